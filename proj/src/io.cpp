#include "evbranch/io.hpp"

#include <fstream>
#include <sstream>

namespace evbranch::io {

namespace {

std::size_t as_index(const json& v, const char* what) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ParseError(std::string(what) + " must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

double as_number(const json& v, const char* what) {
    if (!v.is_number()) {
        throw ParseError(std::string(what) + " must be a number");
    }
    return v.get<double>();
}

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

template <class Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            fn(json::parse(line));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what(), lineno);
        } catch (const json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what(), lineno);
        } catch (const std::invalid_argument& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what(), lineno);
        }
    }
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(what), line_(line) {}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

TypeMap read_type_map(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) {
        throw ParseError(path.string() + ": type map must be an object {\"label\": index}");
    }
    TypeMap map;
    for (const auto& [label, index] : j.items()) {
        map[label] = as_index(index, "type map index");
    }
    return map;
}

EventSequence parse_sequence(const json& j, const TypeMap* types) {
    const std::string id = j.contains("id") ? require(j, "id").get<std::string>() : std::string{};
    const double horizon = as_number(require(j, "T"), "\"T\"");
    const json& raw = require(j, "events");
    if (!raw.is_array()) {
        throw ParseError("\"events\" must be an array");
    }
    std::vector<Event> events;
    events.reserve(raw.size());
    for (const auto& e : raw) {
        const double t = as_number(require(e, "t"), "event \"t\"");
        const json& c = require(e, "c");
        std::size_t type = 0;
        if (c.is_string()) {
            if (types == nullptr) {
                throw ParseError("event type label '" + c.get<std::string>() +
                                 "' given but no type map supplied");
            }
            const auto it = types->find(c.get<std::string>());
            if (it == types->end()) {
                throw ParseError("unknown event type label '" + c.get<std::string>() + "'");
            }
            type = it->second;
        } else {
            type = as_index(c, "event \"c\"");
        }
        events.push_back({t, type});
    }
    return EventSequence(id, horizon, std::move(events));
}

Dataset read_sequences(const fs::path& path, const TypeMap* types) {
    Dataset out;
    for_each_line(path, [&](const json& j) { out.push_back(parse_sequence(j, types)); });
    return out;
}

json sequence_to_json(const EventSequence& seq) {
    json events = json::array();
    for (const auto& e : seq.events()) {
        events.push_back({{"t", e.t}, {"c", e.c}});
    }
    return {{"id", seq.id()}, {"T", seq.horizon()}, {"events", std::move(events)}};
}

std::string format_sequences(const Dataset& dataset) {
    std::string out;
    for (const auto& seq : dataset) {
        out += sequence_to_json(seq).dump();
        out += '\n';
    }
    return out;
}

std::vector<BranchLabels> read_labels(const fs::path& path) {
    std::vector<BranchLabels> out;
    for_each_line(path, [&](const json& j) {
        BranchLabels labels;
        labels.id = j.contains("id") ? j.at("id").get<std::string>() : std::string{};
        const json& parents = require(j, "parent");
        if (!parents.is_array()) {
            throw ParseError("\"parent\" must be an array");
        }
        for (std::size_t i = 0; i < parents.size(); ++i) {
            if (!parents[i].is_number_integer()) {
                throw ParseError("parent entries must be integers");
            }
            const long p = parents[i].get<long>();
            if (p < -1 || p >= static_cast<long>(i)) {
                throw ParseError("parent[" + std::to_string(i) + "] = " + std::to_string(p) +
                                 " violates parent < n");
            }
            labels.parent.push_back(p);
        }
        out.push_back(std::move(labels));
    });
    return out;
}

std::string format_labels(const std::vector<BranchLabels>& labels) {
    std::string out;
    for (const auto& l : labels) {
        out += json{{"id", l.id}, {"parent", l.parent}}.dump();
        out += '\n';
    }
    return out;
}

HawkesParams params_from_json(const json& j) {
    try {
        const json& mu_j = require(j, "mu");
        const json& a_j = require(j, "A");
        if (!mu_j.is_array() || !a_j.is_array()) {
            throw ParseError("\"mu\" and \"A\" must be arrays");
        }
        const auto C = static_cast<Eigen::Index>(mu_j.size());
        Vector mu(C);
        Matrix A(C, C);
        if (static_cast<Eigen::Index>(a_j.size()) != C) {
            throw ParseError("\"A\" must have len(mu) rows");
        }
        for (Eigen::Index c = 0; c < C; ++c) {
            mu(c) = as_number(mu_j[static_cast<std::size_t>(c)], "mu entry");
            const json& row = a_j[static_cast<std::size_t>(c)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != C) {
                throw ParseError("\"A\" must be a C x C array of arrays");
            }
            for (Eigen::Index k = 0; k < C; ++k) {
                A(c, k) = as_number(row[static_cast<std::size_t>(k)], "A entry");
            }
        }
        const double beta = j.contains("beta") ? as_number(j.at("beta"), "\"beta\"") : 1.0;
        return HawkesParams(std::move(mu), std::move(A), ExpKernel(beta));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

json params_to_json(const HawkesParams& params) {
    json mu = json::array();
    json A = json::array();
    const auto C = static_cast<Eigen::Index>(params.num_types());
    for (Eigen::Index c = 0; c < C; ++c) {
        mu.push_back(params.mu()(c));
        json row = json::array();
        for (Eigen::Index k = 0; k < C; ++k) {
            row.push_back(params.infectivity()(c, k));
        }
        A.push_back(std::move(row));
    }
    return {{"mu", std::move(mu)}, {"A", std::move(A)}, {"beta", params.kernel().beta()}};
}

json matrix_to_dense_json(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            data.push_back(m(i, j));
        }
    }
    return {{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

json matrix_to_triplet_json(const Matrix& m) {
    json triplets = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) {
                triplets.push_back({i, j, m(i, j)});
            }
        }
    }
    return {{"shape", {m.rows(), m.cols()}}, {"format", "triplet"}, {"triplets", std::move(triplets)}};
}

Matrix matrix_from_json(const json& j) {
    try {
        const json& shape = require(j, "shape");
        if (!shape.is_array() || shape.size() != 2) {
            throw ParseError("\"shape\" must be [rows, cols]");
        }
        const auto rows = static_cast<Eigen::Index>(as_index(shape[0], "rows"));
        const auto cols = static_cast<Eigen::Index>(as_index(shape[1], "cols"));
        Matrix m = Matrix::Zero(rows, cols);
        if (j.contains("triplets")) {
            for (const auto& t : j.at("triplets")) {
                if (!t.is_array() || t.size() != 3) {
                    throw ParseError("triplets must be [row, col, value]");
                }
                const auto r = static_cast<Eigen::Index>(as_index(t[0], "triplet row"));
                const auto c = static_cast<Eigen::Index>(as_index(t[1], "triplet col"));
                if (r >= rows || c >= cols) {
                    throw ParseError("triplet index outside the declared shape");
                }
                m(r, c) = as_number(t[2], "triplet value");
            }
            return m;
        }
        const json& data = require(j, "data");
        if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
            throw ParseError("\"data\" must hold rows * cols values");
        }
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index k = 0; k < cols; ++k) {
                m(i, k) = as_number(data[static_cast<std::size_t>(i * cols + k)], "matrix entry");
            }
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

json badmm_config_to_json(const BadmmConfig& cfg) {
    return {{"lambda", cfg.lambda},       {"alpha", cfg.alpha},
            {"rho", cfg.rho},             {"regularizer", to_string(cfg.regularizer)},
            {"max_iters", cfg.max_iters}, {"tol", cfg.tol},
            {"floor", cfg.floor}};
}

BadmmConfig badmm_config_from_json(const json& j, BadmmConfig base) {
    if (!j.is_object()) {
        throw ParseError("badmm config must be an object");
    }
    if (j.contains("lambda")) base.lambda = as_number(j.at("lambda"), "lambda");
    if (j.contains("alpha")) base.alpha = as_number(j.at("alpha"), "alpha");
    if (j.contains("rho")) base.rho = as_number(j.at("rho"), "rho");
    if (j.contains("regularizer")) base.regularizer = parse_regularizer(j.at("regularizer").get<std::string>());
    if (j.contains("max_iters")) base.max_iters = as_index(j.at("max_iters"), "max_iters");
    if (j.contains("tol")) base.tol = as_number(j.at("tol"), "tol");
    if (j.contains("floor")) base.floor = as_number(j.at("floor"), "floor");
    return base;
}

json em_config_to_json(const EmConfig& cfg) {
    json j = {{"max_em_iters", cfg.max_em_iters},
              {"loglik_tol", cfg.loglik_tol},
              {"param_floor", cfg.param_floor}};
    j["badmm"] = cfg.badmm ? badmm_config_to_json(*cfg.badmm) : json(nullptr);
    return j;
}

json fit_result_to_json(const FitResult& result, const Dataset& dataset, const EmConfig& cfg,
                        MatrixLayout layout) {
    json j = {{"params", params_to_json(result.params)},
              {"loglik_history", result.loglik_history},
              {"iterations_run", result.iterations_run},
              {"warnings", result.warnings},
              {"config", em_config_to_json(cfg)}};
    if (layout != MatrixLayout::none) {
        json resp = json::array();
        for (std::size_t i = 0; i < result.responsibilities.size(); ++i) {
            json m = layout == MatrixLayout::dense
                         ? matrix_to_dense_json(result.responsibilities[i].entries())
                         : matrix_to_triplet_json(result.responsibilities[i].entries());
            m["id"] = i < dataset.size() ? dataset[i].id() : std::string{};
            resp.push_back(std::move(m));
        }
        j["responsibilities"] = std::move(resp);
    }
    return j;
}

StoredFit fit_result_from_json(const json& j) {
    StoredFit out{params_from_json(require(j, "params")), {}, {}, std::nullopt};
    if (j.contains("config") && j.at("config").contains("badmm") &&
        !j.at("config").at("badmm").is_null()) {
        out.badmm = badmm_config_from_json(j.at("config").at("badmm"));
    }
    if (j.contains("responsibilities")) {
        for (const auto& m : j.at("responsibilities")) {
            out.ids.push_back(m.contains("id") ? m.at("id").get<std::string>() : std::string{});
            try {
                out.responsibilities.emplace_back(matrix_from_json(m));
            } catch (const InvariantError& e) {
                throw ParseError(e.what());
            }
        }
    }
    return out;
}

json metrics_to_json(const MetricsReport& report) {
    return {{"ell", report.ell},
            {"acc", report.acc},
            {"per_type_acc", report.per_type_acc},
            {"per_type_count", report.per_type_count},
            {"n_events", report.n_events}};
}

json branch_report_to_json(const BranchReport& report) {
    json j = {{"parent_accuracy", report.parent_accuracy},
              {"immigrant_f1", report.immigrant_f1},
              {"n_events", report.n_events}};
    j["support_size"] = report.support_size ? json(*report.support_size) : json(nullptr);
    j["numerical_rank"] = report.numerical_rank ? json(*report.numerical_rank) : json(nullptr);
    return j;
}

std::string metrics_tsv(const MetricsReport& report, const std::optional<BranchReport>& branch) {
    std::ostringstream header;
    std::ostringstream row;
    row.precision(17);
    header << "ell\tacc\tn_events";
    row << report.ell << '\t' << report.acc << '\t' << report.n_events;
    for (std::size_t c = 0; c < report.per_type_acc.size(); ++c) {
        header << "\tacc_type" << c;
        row << '\t' << report.per_type_acc[c];
    }
    if (branch) {
        header << "\tparent_accuracy\timmigrant_f1";
        row << '\t' << branch->parent_accuracy << '\t' << branch->immigrant_f1;
    }
    return header.str() + "\n" + row.str() + "\n";
}

}  // namespace evbranch::io
