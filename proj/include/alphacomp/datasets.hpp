#pragma once

// Registry of the four real compositional datasets the comparison tables were
// built from. The data themselves are not shipped; users supply CSVs, which
// are checked against the expected column labels here.

#include "alphacomp/errors.hpp"
#include "alphacomp/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace alphacomp {

struct ReferenceEstimates {
    std::vector<double> direct_mle;
    std::vector<double> asymptotic1;
    std::vector<double> asymptotic2;
};

struct DatasetSpec {
    std::string key;
    std::string name;
    std::vector<std::string> labels;
    std::string provenance;
    /// Published maximizing alpha and the shape estimates at that alpha.
    double reference_alpha;
    ReferenceEstimates reference;
};

inline const std::vector<DatasetSpec>& dataset_registry() {
    static const std::vector<DatasetSpec> registry{
        {"mammals",
         "Mammals",
         {"water", "protein", "fat", "lactose", "ash"},
         "Hartigan (1975), Clustering Algorithms: milk composition of 24 mammals",
         0.06,
         {{793.908, 671.054, 680.629, 663.055, 604.305},
          {782.297, 668.362, 677.964, 660.235, 597.352},
          {793.673, 670.856, 680.428, 662.859, 604.127}}},
        {"clams",
         "East Bay Clams",
         {"dl", "dm", "ds"},
         "Aitchison (1986), The Statistical Analysis of Compositional Data: clam colonies by colour and size",
         0.28,
         {{232.218, 224.377, 222.197}, {231.568, 223.800, 221.592}, {231.990, 224.156, 221.979}}},
        {"oecd",
         "OECD",
         {"PCINC", "AGR", "IND", "SER"},
         "DASL library (oecdat): labour force shares and per capita income, 20 European OECD countries, 1960",
         0.14,
         {{212.965, 129.782, 143.360, 136.907},
          {199.034, 124.925, 139.824, 132.928},
          {212.669, 129.601, 143.161, 136.716}}},
        {"grta",
         "GRTA",
         {"Killed", "Seriously injured", "Slightly injured"},
         "Greek road traffic accident statistics, monthly, January 2010 to August 2017",
         -0.04,
         {{28366.65, 28109.32, 25420.99}, {28305.94, 28057.80, 25320.62}, {28366.36, 28109.03, 25420.73}}},
    };
    return registry;
}

inline std::optional<DatasetSpec> find_dataset(std::string_view key) {
    for (const auto& spec : dataset_registry()) {
        if (spec.key == key) return spec;
    }
    return std::nullopt;
}

namespace detail {

inline std::string fold(std::string_view s) {
    std::string out;
    for (char ch : trim(s)) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return out;
}

} // namespace detail

/// Checks a loaded CSV against the registry entry (column count and labels,
/// compared case-insensitively) and stamps name and provenance onto it.
inline void validate_against(Dataset& ds, const DatasetSpec& spec) {
    if (ds.dimension() != spec.labels.size()) {
        throw DomainError(spec.name + " expects " + std::to_string(spec.labels.size()) + " columns, got " +
                          std::to_string(ds.dimension()));
    }
    for (std::size_t j = 0; j < spec.labels.size(); ++j) {
        if (detail::fold(ds.component_labels[j]) != detail::fold(spec.labels[j])) {
            throw DomainError(spec.name + ": column " + std::to_string(j + 1) + " is '" + ds.component_labels[j] +
                              "', expected '" + spec.labels[j] + "'");
        }
    }
    ds.name = spec.name;
    ds.component_labels = spec.labels;
    ds.provenance = spec.provenance;
}

} // namespace alphacomp
