#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sepnmf/clustering.hpp"
#include "sepnmf/dataset.hpp"
#include "sepnmf/errors.hpp"
#include "sepnmf/format.hpp"
#include "sepnmf/nmf.hpp"
#include "sepnmf/pca.hpp"
#include "sepnmf/pipeline.hpp"
#include "sepnmf/separative.hpp"
#include "sepnmf/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace sepnmf;

namespace {

struct CommonOpts {
    std::string input;
    std::string out;
    std::string group_col = "group";
    std::string format = "json";
    std::string impute = "none";
    int bins = kDefaultEntropyBins;
    SolverConfig solver;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

void flatten_json(const json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            flatten_json(value, prefix.empty() ? key : prefix + "." + key, rows);
        }
    } else if (j.is_array()) {
        const bool scalars = std::all_of(j.begin(), j.end(),
                                         [](const json& e) { return !e.is_structured(); });
        if (scalars) {
            std::string joined;
            for (const auto& e : j) {
                if (!joined.empty()) joined += ';';
                joined += e.is_string() ? e.get<std::string>() : e.dump();
            }
            rows.emplace_back(prefix, joined);
        } else {
            for (std::size_t i = 0; i < j.size(); ++i) {
                flatten_json(j[i], prefix + "." + std::to_string(i), rows);
            }
        }
    } else if (j.is_string()) {
        rows.emplace_back(prefix, j.get<std::string>());
    } else {
        rows.emplace_back(prefix, j.dump());
    }
}

// Writes <name>.json; with --format csv a flat key,value twin is written too.
void write_json(const fs::path& dir, const std::string& name, const json& j,
                const std::string& format) {
    const fs::path path = dir / (name + ".json");
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);

    if (format == "csv") {
        const fs::path twin = dir / (name + ".csv");
        auto csv = open_out(twin);
        csv << "key,value\n";
        std::vector<std::pair<std::string, std::string>> rows;
        flatten_json(j, "", rows);
        for (const auto& [key, value] : rows) csv << key << ',' << value << '\n';
        finish(csv, twin);
    }
}

void write_factor_csv(const fs::path& path, const Matrix& factor,
                      const std::vector<std::string>& ids, const std::string& id_header) {
    auto out = open_out(path);
    out << id_header;
    for (Index k = 0; k < factor.cols(); ++k) out << ",c" << k;
    out << '\n';
    for (Index i = 0; i < factor.rows(); ++i) {
        out << ids[static_cast<std::size_t>(i)];
        for (Index k = 0; k < factor.cols(); ++k) out << ',' << format_double(factor(i, k));
        out << '\n';
    }
    finish(out, path);
}

MaskedMatrix imputed_dataset_matrix(const Dataset& d, const std::string& impute) {
    if (impute == "mean" && !d.matrix.fully_observed()) {
        return MaskedMatrix(mean_impute(d.matrix), Mask::Constant(d.matrix.n_rows(),
                                                                  d.matrix.n_cols(), true),
                            d.matrix.row_ids(), d.matrix.col_ids());
    }
    return d.matrix;
}

json entropy_json(const EntropyReport& report, int bins) {
    json j;
    j["bins"] = bins;
    j["whole_matrix_entropy"] = report.whole_matrix_entropy;
    j["clustering_entropy"] = report.clustering_entropy;
    j["entropy_delta"] = report.entropy_delta;
    j["diagonal_clusters"] = json::array();
    for (const auto& d : report.diagonal_entropies) {
        j["diagonal_clusters"].push_back(
            {{"cluster", d.cluster}, {"entropy", d.entropy}, {"size", d.size}});
    }
    j["empty_clusters"] = report.empty_clusters;
    return j;
}

void write_clusters_csv(const fs::path& path, const ClusterAssignment& a,
                        const std::vector<std::string>& row_ids,
                        const std::vector<std::string>& col_ids) {
    auto out = open_out(path);
    out << "kind,id,cluster,leverage\n";
    for (std::size_t i = 0; i < a.row_cluster.size(); ++i) {
        out << "row," << row_ids[i] << ',' << a.row_cluster[i] << ','
            << format_double(a.row_leverage(static_cast<Index>(i), a.row_cluster[i])) << '\n';
    }
    for (std::size_t j = 0; j < a.col_cluster.size(); ++j) {
        out << "col," << col_ids[j] << ',' << a.col_cluster[j] << ','
            << format_double(a.col_leverage(static_cast<Index>(j), a.col_cluster[j])) << '\n';
    }
    finish(out, path);
}

void write_heatmap_csv(const fs::path& path, const HeatmapOrder& order,
                       const std::vector<std::string>& row_ids,
                       const std::vector<std::string>& col_ids) {
    auto out = open_out(path);
    out << "kind,position,index,id\n";
    for (std::size_t p = 0; p < order.row_order.size(); ++p) {
        const Index i = order.row_order[p];
        out << "row," << p << ',' << i << ',' << row_ids[static_cast<std::size_t>(i)] << '\n';
    }
    for (std::size_t p = 0; p < order.col_order.size(); ++p) {
        const Index j = order.col_order[p];
        out << "col," << p << ',' << j << ',' << col_ids[static_cast<std::size_t>(j)] << '\n';
    }
    finish(out, path);
}

void write_sorted_loadings_csv(const fs::path& path, const Matrix& h,
                               const std::vector<std::string>& col_ids) {
    const auto ranked = top_features(h, col_ids, static_cast<int>(h.rows()));
    auto out = open_out(path);
    out << "component,position,id,loading\n";
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        for (std::size_t p = 0; p < ranked[k].size(); ++p) {
            out << k << ',' << p << ',' << ranked[k][p].id << ','
                << format_double(ranked[k][p].loading) << '\n';
        }
    }
    finish(out, path);
}

void write_incidence_csv(const fs::path& path, const IncidenceMatrix& inc) {
    auto out = open_out(path);
    out << "group";
    for (int k = 0; k < inc.cluster_count; ++k) out << ",cluster_" << k;
    out << '\n';
    for (std::size_t g = 0; g < inc.group_labels.size(); ++g) {
        out << inc.group_labels[g];
        for (int k = 0; k < inc.cluster_count; ++k) {
            out << ',' << format_double(inc.proportions(static_cast<Index>(g), k));
        }
        out << '\n';
    }
    finish(out, path);
}

json top_features_json(const Matrix& h, const std::vector<std::string>& col_ids, int k) {
    const auto ranked = top_features(h, col_ids, k);
    json j;
    j["k"] = k;
    j["components"] = json::array();
    for (const auto& component : ranked) {
        json list = json::array();
        for (const auto& feature : component) {
            list.push_back({{"id", feature.id}, {"loading", feature.loading}});
        }
        j["components"].push_back(std::move(list));
    }
    return j;
}

json fit_report_json(const FitReport& report) {
    json j;
    j["rel_sq_error"] = report.rel_sq_error;
    if (report.rel_sq_error_original.has_value()) {
        j["rel_sq_error_original"] = *report.rel_sq_error_original;
    }
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["reseeded_components"] = report.reseeded_components;
    j["dead_components"] = report.dead_components;
    j["error_trace"] = report.error_trace;
    return j;
}

fs::path prepare_out_dir(const std::string& out) {
    const fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
    return dir;
}

Dataset load_input(const CommonOpts& opts) {
    CsvOptions csv;
    csv.group_col = opts.group_col;
    return load_csv(opts.input, csv);
}

int run_profile(const CommonOpts& opts) {
    const Dataset d = load_input(opts);
    const ProfileReport report = profile(d);
    const fs::path dir = prepare_out_dir(opts.out);

    {
        const fs::path path = dir / "fill_rates_by_feature.csv";
        auto out = open_out(path);
        out << "feature,fill_rate\n";
        for (const auto& e : report.feature_rates) {
            out << e.id << ',' << format_double(e.rate) << '\n';
        }
        finish(out, path);
    }

    const bool has_groups = d.row_groups.has_value();
    if (has_groups) {
        const fs::path path = dir / "fill_rates_by_group.csv";
        auto out = open_out(path);
        out << "group,fill_rate\n";
        for (const auto& e : report.group_rates) {
            out << e.id << ',' << format_double(e.rate) << '\n';
        }
        finish(out, path);

        const fs::path grid_path = dir / "grid.csv";
        auto grid = open_out(grid_path);
        grid << "group";
        for (const auto& id : d.matrix.col_ids()) grid << ',' << id;
        grid << '\n';
        for (std::size_t g = 0; g < report.grid.groups.size(); ++g) {
            grid << report.grid.groups[g];
            for (Index j = 0; j < d.matrix.n_cols(); ++j) {
                grid << ',' << format_double(report.grid.rates(static_cast<Index>(g), j));
            }
            grid << '\n';
        }
        finish(grid, grid_path);
    }

    json summary;
    summary["rows"] = d.matrix.n_rows();
    summary["features"] = d.matrix.n_cols();
    summary["global_fill_rate"] = report.global_rate;
    summary["has_groups"] = has_groups;
    if (!has_groups) {
        summary["omitted"] = {"fill_rates_by_group.csv", "grid.csv"};
        summary["note"] = "no group column in input";
    }
    write_json(dir, "summary", summary, opts.format);
    return 0;
}

int run_fit(const CommonOpts& opts, const std::string& variant) {
    const Dataset d = load_input(opts);
    const MaskedMatrix x = imputed_dataset_matrix(d, opts.impute);
    const fs::path dir = prepare_out_dir(opts.out);

    json report_json;
    report_json["variant"] = variant;
    report_json["rank"] = opts.solver.rank;
    report_json["sparsity_h"] = opts.solver.sparsity_h;
    report_json["seed"] = opts.solver.seed;

    if (variant == "snmf") {
        const auto [model, report] = fit_snmf(x, opts.solver);
        write_factor_csv(dir / "W.csv", model.W, x.row_ids(), "id");
        write_factor_csv(dir / "H.csv", model.H, x.col_ids(), "id");
        write_factor_csv(dir / "Q.csv", model.Q, {"plus", "minus"}, "slice");
        {
            const fs::path path = dir / "directions.csv";
            auto out = open_out(path);
            out << "component,direction\n";
            for (std::size_t k = 0; k < model.directions.size(); ++k) {
                out << k << ',' << model.directions[k] << '\n';
            }
            finish(out, path);
        }
        const auto assignment = assign_clusters(model);
        write_clusters_csv(dir / "clusters.csv", assignment, x.row_ids(), x.col_ids());
        write_heatmap_csv(dir / "heatmap_order.csv", reorder_for_heatmap(x, assignment),
                          x.row_ids(), x.col_ids());
        write_sorted_loadings_csv(dir / "sorted_loadings.csv", model.H, x.col_ids());
        write_json(dir, "entropy",
                   entropy_json(clustering_entropy(x, assignment, opts.bins), opts.bins),
                   opts.format);
        if (d.row_groups.has_value()) {
            write_incidence_csv(dir / "incidence.csv", incidence(*d.row_groups, assignment));
        }
        write_json(dir, "top_features",
                   top_features_json(model.H, x.col_ids(),
                                     std::min<int>(5, static_cast<int>(x.n_cols()))),
                   opts.format);
        report_json.update(fit_report_json(report));
    } else {
        NmfModel model;
        FitReport report;
        std::vector<std::string> h_ids;
        MaskedMatrix fitted = x;
        if (variant == "posneg") {
            const auto [pn_model, pn_report] = fit_posneg_nmf(x, opts.solver);
            model.W = pn_model.W;
            model.H = Matrix(x.n_cols() * 2, pn_model.W.cols());
            model.H << pn_model.H_plus, pn_model.H_minus;
            report = pn_report;
            for (const auto& id : x.col_ids()) h_ids.push_back(id + "+");
            for (const auto& id : x.col_ids()) h_ids.push_back(id + "-");
            const auto sep = separate(x);
            Matrix concat(x.n_rows(), 2 * x.n_cols());
            concat << sep.x_plus.values(), sep.x_minus.values();
            Mask concat_mask(x.n_rows(), 2 * x.n_cols());
            concat_mask << sep.x_plus.mask(), sep.x_minus.mask();
            fitted = MaskedMatrix(concat, concat_mask, x.row_ids(), h_ids);
        } else {
            std::tie(model, report) = fit_nmf(x, opts.solver);
            h_ids = x.col_ids();
        }
        write_factor_csv(dir / "W.csv", model.W, fitted.row_ids(), "id");
        write_factor_csv(dir / "H.csv", model.H, h_ids, "id");
        const auto assignment = assign_clusters(model);
        write_clusters_csv(dir / "clusters.csv", assignment, fitted.row_ids(), h_ids);
        write_heatmap_csv(dir / "heatmap_order.csv", reorder_for_heatmap(fitted, assignment),
                          fitted.row_ids(), h_ids);
        write_sorted_loadings_csv(dir / "sorted_loadings.csv", model.H, h_ids);
        write_json(dir, "entropy",
                   entropy_json(clustering_entropy(fitted, assignment, opts.bins), opts.bins),
                   opts.format);
        if (d.row_groups.has_value()) {
            write_incidence_csv(dir / "incidence.csv", incidence(*d.row_groups, assignment));
        }
        write_json(dir, "top_features",
                   top_features_json(model.H, h_ids,
                                     std::min<int>(5, static_cast<int>(model.H.rows()))),
                   opts.format);
        report_json.update(fit_report_json(report));
    }

    write_json(dir, "fit_report", report_json, opts.format);
    return 0;
}

int run_compare(const CommonOpts& opts) {
    const Dataset d = load_input(opts);
    const fs::path dir = prepare_out_dir(opts.out);
    const ComparisonReport report = run_comparison(d.matrix, opts.solver, opts.bins);

    {
        const fs::path path = dir / "comparison.csv";
        auto out = open_out(path);
        out << "model,dimension,features,h_sparsity,rel_error\n";
        for (const auto& row : report.rows) {
            out << row.model << ',' << row.dimension << ',' << row.features << ','
                << format_double(row.h_sparsity) << ',' << format_double(row.rel_error)
                << '\n';
        }
        finish(out, path);
    }
    {
        const fs::path path = dir / "entropy_delta.csv";
        auto out = open_out(path);
        out << "model,whole_matrix_entropy,clustering_entropy,entropy_delta\n";
        out << "Restricted NMF," << format_double(report.nmf_entropy.whole_matrix_entropy)
            << ',' << format_double(report.nmf_entropy.clustering_entropy) << ','
            << format_double(report.nmf_entropy.entropy_delta) << '\n';
        out << "Restricted S2NMF," << format_double(report.snmf_entropy.whole_matrix_entropy)
            << ',' << format_double(report.snmf_entropy.clustering_entropy) << ','
            << format_double(report.snmf_entropy.entropy_delta) << '\n';
        finish(out, path);
    }
    return 0;
}

int run_pca(const CommonOpts& opts, bool standardize) {
    const Dataset d = load_input(opts);
    Matrix dense;
    if (opts.impute == "mean") {
        dense = mean_impute(d.matrix);
    } else {
        if (!d.matrix.fully_observed()) {
            throw InvalidInputError("input has missing cells; rerun with --impute mean");
        }
        dense = d.matrix.values();
    }
    const PcaModel model = fit_pca(dense, standardize);
    const fs::path dir = prepare_out_dir(opts.out);

    {
        const fs::path path = dir / "explained_variance.csv";
        auto out = open_out(path);
        out << "component,ratio,cumulative\n";
        for (Index k = 0; k < model.explained_variance_ratio.size(); ++k) {
            out << k << ',' << format_double(model.explained_variance_ratio(k)) << ','
                << format_double(model.cumulative_ratio(k)) << '\n';
        }
        finish(out, path);
    }
    {
        const auto profile =
            signed_coefficient_profile(model, static_cast<int>(model.components.cols()));
        const fs::path path = dir / "components_sorted.csv";
        auto out = open_out(path);
        out << "component,position,coefficient\n";
        for (std::size_t k = 0; k < profile.sorted_coefficients.size(); ++k) {
            const Vector& coef = profile.sorted_coefficients[k];
            for (Index p = 0; p < coef.size(); ++p) {
                out << k << ',' << p << ',' << format_double(coef(p)) << '\n';
            }
        }
        finish(out, path);

        json thresholds;
        thresholds["thresholds"] = json::object();
        for (double t : {0.8, 0.9, 0.95}) {
            thresholds["thresholds"][format_double(t)] = components_needed(model, t);
        }
        thresholds["significant_counts"] = profile.significant_counts;
        write_json(dir, "threshold_components", thresholds, opts.format);
    }
    return 0;
}

struct SynthOpts {
    std::string out;
    std::string format = "json";
    SynthSpec spec;
};

int run_synth(const SynthOpts& opts) {
    opts.spec.validate();
    const auto [d, truth] = generate(opts.spec);
    const fs::path dir = prepare_out_dir(opts.out);

    save_csv(d, (dir / "data.csv").string(), {});
    {
        const fs::path path = dir / "groups.csv";
        auto out = open_out(path);
        out << "id,group\n";
        for (std::size_t i = 0; i < d.matrix.row_ids().size(); ++i) {
            out << d.matrix.row_ids()[i] << ',' << (*d.row_groups)[i] << '\n';
        }
        finish(out, path);
    }

    const fs::path truth_dir = dir / "ground_truth";
    std::error_code ec;
    fs::create_directories(truth_dir, ec);
    if (ec) throw IoError("cannot create " + truth_dir.string());

    write_factor_csv(truth_dir / "W.csv", truth.w, d.matrix.row_ids(), "id");
    write_factor_csv(truth_dir / "H.csv", truth.h, d.matrix.col_ids(), "id");
    {
        const fs::path path = truth_dir / "directions.csv";
        auto out = open_out(path);
        out << "component,direction\n";
        for (std::size_t k = 0; k < truth.directions.size(); ++k) {
            out << k << ',' << truth.directions[k] << '\n';
        }
        finish(out, path);
    }
    {
        const fs::path path = truth_dir / "relevance.csv";
        auto out = open_out(path);
        out << "feature,relevant\n";
        for (std::size_t j = 0; j < truth.relevance.size(); ++j) {
            out << d.matrix.col_ids()[j] << ',' << (truth.relevance[j] ? 1 : 0) << '\n';
        }
        finish(out, path);
    }
    return 0;
}

void add_config_flag(CLI::App* cmd, std::string& path) {
    cmd->add_option("--config", path, "Flat key=value defaults file");
}

void add_common_solver_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--rank", opts.solver.rank, "Component count");
    cmd->add_option("--sparsity-h", opts.solver.sparsity_h, "Hoyer target for H columns");
    cmd->add_option("--max-iter", opts.solver.max_iter, "Sweep limit");
    cmd->add_option("--tol", opts.solver.tol, "Relative improvement tolerance");
    cmd->add_option("--seed", opts.solver.seed, "RNG seed");
    cmd->add_option("--bins", opts.bins, "Entropy histogram bins");
    cmd->add_option("--impute", opts.impute, "Missing-value handling")
        ->check(CLI::IsMember({"none", "mean"}));
}

void add_io_flags(CLI::App* cmd, CommonOpts& opts, bool needs_input = true) {
    auto* in = cmd->add_option("--input,-i", opts.input, "Input CSV path");
    if (needs_input) in->required();
    cmd->add_option("--out,-o", opts.out, "Output directory")->required();
    cmd->add_option("--group-col", opts.group_col, "Group column name");
    cmd->add_option("--format", opts.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
}

std::string trimmed_config_token(std::string s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = trimmed_config_token(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw InvalidInputError("config line " + std::to_string(lineno) +
                                    " is not key=value: " + text);
        }
        const std::string key = trimmed_config_token(text.substr(0, eq));
        const std::string value = trimmed_config_token(text.substr(eq + 1));
        if (key.empty()) {
            throw InvalidInputError("config line " + std::to_string(lineno) +
                                    " has an empty key");
        }
        entries.emplace_back(key, value);
    }
    return entries;
}

// Flat key=value config support: file values become extra command-line tokens
// for any flag not already given, so explicit flags keep precedence.
std::vector<std::string> args_with_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    std::set<std::string> used;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (a.rfind("--config=", 0) == 0) config_path = a.substr(9);
        if (a.rfind("--", 0) == 0) {
            used.insert(a.substr(2, a.find('=') - 2));
        } else if (a == "-i") {
            used.insert("input");
        } else if (a == "-o") {
            used.insert("out");
        }
    }
    if (config_path.empty()) return args;
    for (const auto& [key, value] : read_flat_config(config_path)) {
        if (key == "config" || used.count(key) > 0) continue;
        args.push_back("--" + key + "=" + value);
        used.insert(key);
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Masked NMF, separative factorizations, and clustering reports"};
    app.require_subcommand(1);
    std::string config_path;

    CommonOpts profile_opts;
    auto* profile_cmd = app.add_subcommand("profile", "Fill-rate profiling reports");
    add_io_flags(profile_cmd, profile_opts);
    add_config_flag(profile_cmd, config_path);

    CommonOpts fit_opts;
    std::string variant = "nmf";
    auto* fit_cmd = app.add_subcommand("fit", "Factorize and emit clustering reports");
    add_io_flags(fit_cmd, fit_opts);
    add_common_solver_flags(fit_cmd, fit_opts);
    fit_cmd->add_option("--variant", variant, "Factorization flavor")
        ->check(CLI::IsMember({"nmf", "posneg", "snmf"}));
    add_config_flag(fit_cmd, config_path);

    CommonOpts compare_opts;
    compare_opts.solver.sparsity_h = 0.9;
    auto* compare_cmd = app.add_subcommand("compare", "Six-row model comparison table");
    add_io_flags(compare_cmd, compare_opts);
    add_common_solver_flags(compare_cmd, compare_opts);
    add_config_flag(compare_cmd, config_path);

    CommonOpts pca_opts;
    pca_opts.impute = "mean";
    bool standardize = false;
    auto* pca_cmd = app.add_subcommand("pca", "PCA baseline reports");
    add_io_flags(pca_cmd, pca_opts);
    pca_cmd->add_option("--impute", pca_opts.impute, "Missing-value handling")
        ->check(CLI::IsMember({"none", "mean"}));
    pca_cmd->add_flag("--standardize", standardize, "Scale columns to unit variance");
    add_config_flag(pca_cmd, config_path);

    SynthOpts synth_opts;
    auto* synth_cmd = app.add_subcommand("synth", "Planted synthetic dataset");
    synth_cmd->add_option("--out,-o", synth_opts.out, "Output directory")->required();
    synth_cmd->add_option("--format", synth_opts.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
    synth_cmd->add_option("--rows", synth_opts.spec.n_rows, "Row count");
    synth_cmd->add_option("--cols", synth_opts.spec.n_cols, "Column count");
    synth_cmd->add_option("--rank", synth_opts.spec.rank, "Planted component count");
    synth_cmd->add_option("--noise", synth_opts.spec.noise_level, "Additive noise sd");
    synth_cmd->add_option("--missing-rate", synth_opts.spec.missing_rate,
                          "Missing-cell probability");
    synth_cmd->add_flag("--two-sided,!--one-sided", synth_opts.spec.two_sided,
                        "Signed component directions");
    synth_cmd->add_option("--noise-features", synth_opts.spec.noise_features,
                          "Pure-noise column count");
    synth_cmd->add_option("--seed", synth_opts.spec.seed, "RNG seed");
    synth_cmd->add_option("--baseline", synth_opts.spec.baseline_level, "Score baseline");
    synth_cmd->add_option("--scale", synth_opts.spec.deviation_scale, "Deviation scale");
    add_config_flag(synth_cmd, config_path);

    try {
        std::vector<std::string> args = args_with_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (app.got_subcommand(profile_cmd)) return run_profile(profile_opts);
        if (app.got_subcommand(fit_cmd)) return run_fit(fit_opts, variant);
        if (app.got_subcommand(compare_cmd)) return run_compare(compare_opts);
        if (app.got_subcommand(pca_cmd)) return run_pca(pca_opts, standardize);
        if (app.got_subcommand(synth_cmd)) return run_synth(synth_opts);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
