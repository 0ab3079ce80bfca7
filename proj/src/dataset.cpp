#include "sepnmf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "sepnmf/errors.hpp"
#include "sepnmf/format.hpp"

namespace sepnmf {

namespace {

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(trimmed(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool is_missing(const std::string& token, const CsvOptions& options) {
    return std::find(options.missing_tokens.begin(), options.missing_tokens.end(), token) !=
           options.missing_tokens.end();
}

double parse_value(const std::string& token, std::size_t line, std::size_t col) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(value)) {
        throw ParseError("cannot parse numeric cell '" + token + "'", line, col);
    }
    if (value < 0.0) {
        throw NegativeValueError("negative value " + token, line, col);
    }
    return value;
}

// Shared theme tag = id text before the first '_'. Only meaningful when
// every column carries one.
std::optional<std::vector<std::string>> derive_prefixes(const std::vector<std::string>& col_ids) {
    std::vector<std::string> prefixes;
    prefixes.reserve(col_ids.size());
    for (const auto& id : col_ids) {
        const auto pos = id.find('_');
        if (pos == std::string::npos || pos == 0) return std::nullopt;
        prefixes.push_back(id.substr(0, pos));
    }
    return prefixes;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        header = split_line(line);
        break;
    }
    if (header.size() < 2) throw ParseError("header needs a row-id column and data", 1, 1);

    Index group_idx = -1;
    std::vector<std::string> col_ids;
    std::vector<std::size_t> value_cells;  // header cell index per feature column
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c] == options.group_col) {
            if (group_idx >= 0) throw DuplicateIdError("duplicate group column in header");
            group_idx = static_cast<Index>(c);
            continue;
        }
        col_ids.push_back(header[c]);
        value_cells.push_back(c);
    }
    if (col_ids.empty()) throw ParseError("no feature columns in header", 1, 1);

    std::vector<std::string> row_ids;
    std::vector<std::string> groups;
    std::vector<double> values;
    std::vector<bool> mask_flags;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " cells, got " +
                                 std::to_string(cells.size()),
                             line_no, 1);
        }
        row_ids.push_back(cells[0]);
        if (group_idx >= 0) groups.push_back(cells[static_cast<std::size_t>(group_idx)]);
        for (std::size_t c : value_cells) {
            const std::string& token = cells[c];
            if (is_missing(token, options)) {
                values.push_back(0.0);
                mask_flags.push_back(false);
            } else {
                values.push_back(parse_value(token, line_no, c + 1));
                mask_flags.push_back(true);
            }
        }
    }
    if (in.bad()) throw IoError("read failure on '" + path + "'");

    const Index n = static_cast<Index>(row_ids.size());
    const Index f = static_cast<Index>(col_ids.size());
    Matrix m(n, f);
    Mask mask(n, f);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < f; ++j) {
            const auto flat = static_cast<std::size_t>(i * f + j);
            m(i, j) = values[flat];
            mask(i, j) = mask_flags[flat];
        }
    }

    Dataset dataset{MaskedMatrix(std::move(m), std::move(mask), std::move(row_ids),
                                 std::move(col_ids)),
                    std::nullopt, std::nullopt};
    if (group_idx >= 0) dataset.row_groups = std::move(groups);
    dataset.feature_prefixes = derive_prefixes(dataset.matrix.col_ids());
    return dataset;
}

void save_csv(const Dataset& dataset, const std::string& path, const CsvOptions& options) {
    const MaskedMatrix& m = dataset.matrix;
    if (dataset.row_groups &&
        static_cast<Index>(dataset.row_groups->size()) != m.n_rows()) {
        throw ShapeMismatchError("group labels do not match row count");
    }
    for (const auto& id : m.col_ids()) {
        if (id == options.group_col) {
            throw InvalidInputError("feature id '" + id + "' collides with the group column");
        }
    }

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    const std::string missing = options.missing_tokens.empty() ? "" : options.missing_tokens[0];
    out << "id";
    if (dataset.row_groups) out << ',' << options.group_col;
    for (const auto& id : m.col_ids()) out << ',' << id;
    out << '\n';
    for (Index i = 0; i < m.n_rows(); ++i) {
        out << m.row_ids()[static_cast<std::size_t>(i)];
        if (dataset.row_groups) out << ',' << (*dataset.row_groups)[static_cast<std::size_t>(i)];
        for (Index j = 0; j < m.n_cols(); ++j) {
            out << ',';
            if (m.observed(i, j)) out << format_double(m.values()(i, j));
            else out << missing;
        }
        out << '\n';
    }
    if (!out) throw IoError("write failure on '" + path + "'");
}

ProfileReport profile(const Dataset& dataset) {
    const MaskedMatrix& m = dataset.matrix;
    ProfileReport report;

    const Vector by_col = fill_rate_by_column(m);
    report.feature_rates.reserve(static_cast<std::size_t>(m.n_cols()));
    for (Index j = 0; j < m.n_cols(); ++j) {
        report.feature_rates.push_back({m.col_ids()[static_cast<std::size_t>(j)], by_col(j)});
    }
    auto by_rate_desc = [](const ProfileEntry& a, const ProfileEntry& b) {
        if (a.rate != b.rate) return a.rate > b.rate;
        return a.id < b.id;
    };
    std::sort(report.feature_rates.begin(), report.feature_rates.end(), by_rate_desc);

    if (dataset.row_groups) {
        report.grid = fill_rate_by_group(m, *dataset.row_groups);
        for (std::size_t g = 0; g < report.grid.groups.size(); ++g) {
            report.group_rates.push_back(
                {report.grid.groups[g], report.grid.group_averages(static_cast<Index>(g))});
        }
        std::sort(report.group_rates.begin(), report.group_rates.end(), by_rate_desc);
    }

    const auto total = static_cast<double>(m.n_rows() * m.n_cols());
    report.global_rate = total > 0.0 ? static_cast<double>(m.observed_count()) / total : 1.0;
    return report;
}

}  // namespace sepnmf
