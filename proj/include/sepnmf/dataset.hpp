#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sepnmf/masked_matrix.hpp"

namespace sepnmf {

struct Dataset {
    MaskedMatrix matrix;
    std::optional<std::vector<std::string>> row_groups;
    std::optional<std::vector<std::string>> feature_prefixes;
};

struct CsvOptions {
    std::string group_col = "group";
    std::vector<std::string> missing_tokens = {"", "NA"};
};

// Comma-separated, one header row, first column = row id. A column whose
// header equals options.group_col carries the per-row group label; every
// other column is numeric with missing cells given by options.missing_tokens.
Dataset load_csv(const std::string& path, const CsvOptions& options = {});

// Mirrors the load_csv dialect; missing cells are written as the first
// missing token. load_csv(save_csv(d)) reproduces d exactly.
void save_csv(const Dataset& dataset, const std::string& path, const CsvOptions& options = {});

struct ProfileEntry {
    std::string id;
    double rate = 0.0;
};

struct ProfileReport {
    std::vector<ProfileEntry> feature_rates;  // sorted by descending rate, ties by id
    std::vector<ProfileEntry> group_rates;    // empty when no groups present
    GroupFillRates grid;
    double global_rate = 0.0;
};

ProfileReport profile(const Dataset& dataset);

}  // namespace sepnmf
