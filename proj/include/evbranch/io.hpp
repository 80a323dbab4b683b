#pragma once

#include "json.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evbranch/badmm.hpp"
#include "evbranch/core.hpp"
#include "evbranch/em.hpp"
#include "evbranch/eval.hpp"
#include "evbranch/simulator.hpp"

namespace evbranch::io {

using nlohmann::json;
namespace fs = std::filesystem;

/// Malformed input. line() is 1-based for line-oriented files, 0 otherwise.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// File could not be opened or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using TypeMap = std::map<std::string, std::size_t>;

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

TypeMap read_type_map(const fs::path& path);

/// One {"id", "T", "events": [{"t", "c"}]} object per line; "c" is an index or a
/// label resolved through the type map.
EventSequence parse_sequence(const json& j, const TypeMap* types = nullptr);
Dataset read_sequences(const fs::path& path, const TypeMap* types = nullptr);
json sequence_to_json(const EventSequence& seq);
std::string format_sequences(const Dataset& dataset);

std::vector<BranchLabels> read_labels(const fs::path& path);
std::string format_labels(const std::vector<BranchLabels>& labels);

/// {"mu": [...], "A": [[...], ...], "beta": b}
HawkesParams params_from_json(const json& j);
json params_to_json(const HawkesParams& params);

/// Dense: {"shape": [r, c], "data": [row-major values]}.
json matrix_to_dense_json(const Matrix& m);
/// Sparse: {"shape": [r, c], "format": "triplet", "triplets": [[row, col, value], ...]}.
json matrix_to_triplet_json(const Matrix& m);
/// Accepts either layout.
Matrix matrix_from_json(const json& j);

json badmm_config_to_json(const BadmmConfig& cfg);
BadmmConfig badmm_config_from_json(const json& j, BadmmConfig base = {});
json em_config_to_json(const EmConfig& cfg);

enum class MatrixLayout { none, dense, triplet };

json fit_result_to_json(const FitResult& result, const Dataset& dataset, const EmConfig& cfg,
                        MatrixLayout layout);

struct StoredFit {
    HawkesParams params;
    std::vector<std::string> ids;
    std::vector<TransitionMatrix> responsibilities;
    std::optional<BadmmConfig> badmm;
};
StoredFit fit_result_from_json(const json& j);

json metrics_to_json(const MetricsReport& report);
json branch_report_to_json(const BranchReport& report);
std::string metrics_tsv(const MetricsReport& report, const std::optional<BranchReport>& branch);

}  // namespace evbranch::io
