#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "drm/drmatrix.hpp"
#include "drm/lie_algebra.hpp"
#include "drm/tensor3.hpp"

namespace drm {

/// Raw structure data as read from a file, before axiom validation.
struct AlgebraData {
  Tensor3 f;
  Mat form;
  std::vector<std::string> labels;
};

AlgebraData algebra_data(const LieAlgebra& A);

/// {"schema_version": 1, "dim", "labels", "f": [[a,b,c,re,im], ...], "B": [[a,b,re,im], ...]}
/// with nonzero entries only, in lexicographic index order.
nlohmann::json algebra_to_json(const AlgebraData& data);
nlohmann::json algebra_to_json(const LieAlgebra& A);

/// Errors: Parse (malformed document, index out of range, duplicate entry).
AlgebraData algebra_from_json(const nlohmann::json& doc);

/// Errors: Io, Parse.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
AlgebraData read_algebra_file(const std::filesystem::path& path);

/// Deterministic serialization (2-space indent, shortest round-trip numbers, trailing newline).
std::string dump_json(const nlohmann::json& doc);

/// Dense complex matrix as rows of [re, im] pairs.
nlohmann::json matrix_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& rows);

/// r-matrix export {schema_version, kappa, r, sym_part, meta}.
nlohmann::json rmatrix_export(const RMatrixField& r, const Vec& kappa, const std::string& algebra_name,
                              const std::string& chain_name, const nlohmann::json& domain_flags);

/// Parses a linear combination of basis labels such as "0.3H + 0.1E",
/// "-H1 + 2*H2" or "0.5i E12". A coefficient may carry an i suffix.
/// Errors: Parse.
Vec parse_kappa(const LieAlgebra& A, std::string_view text);

/// "x", "yi", "x+yi" or "x-yi". Errors: Parse.
cplx parse_complex(std::string_view text);

}  // namespace drm
