#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "segp/data.hpp"

namespace segp {

class FetchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RawLayout {
    Airfoil,    // whitespace table, label last
    Concrete,   // delimited text export of Concrete_Data.xls
    Energy,     // ENB2012_data.xlsx (or a delimited export), label Y1 or Y2
    Wisconsin,  // id, 9 attributes with '?' gaps, class 2/4
    Parkinsons, // header, name column, status label in the middle
    Heart,      // whitespace, class 1/2
    Ionosphere, // 34 attributes, class g/b
    Sonar,      // 60 attributes, class R/M
};

struct KnownDataset {
    std::string name;
    Task task;
    std::size_t rows;
    std::size_t features;
    std::string url;
    RawLayout layout;
    std::size_t energy_target { 0 }; // 0: heating (Y1), 1: cooling (Y2)
};

std::vector<KnownDataset> const& known_datasets();
std::optional<KnownDataset> find_known(std::string_view name);

// Directory searched for canonical <name>.csv files: $SEGP_DATA_DIR if set,
// otherwise the directory configured at build time.
std::filesystem::path data_dir();

// Converts a raw download to the canonical layout and checks its shape.
Dataset convert_raw(KnownDataset const& spec, std::string const& bytes);

// Returns dest/<name>.csv, creating it if needed: from the bundled data
// directory when it has a copy (and no url is forced), else by downloading
// `url` (or the dataset's UCI address) and converting.
std::filesystem::path fetch_dataset(std::string_view name, std::string const& url, std::filesystem::path const& dest);

// Minimal .xlsx reader: numeric cells of the first worksheet, one vector
// per row, empty cells as NaN.
std::vector<std::vector<double>> read_xlsx_numeric(std::string const& bytes);

} // namespace segp
