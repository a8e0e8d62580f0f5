#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "segp/fetch.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

#include <fmt/core.h>
#include <httplib.h>
#include <zlib.h>

#ifndef SEGP_DEFAULT_DATA_DIR
#define SEGP_DEFAULT_DATA_DIR "data"
#endif

namespace segp {

namespace {

constexpr std::string_view uci = "https://archive.ics.uci.edu/ml/machine-learning-databases/";

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<double> number(std::string_view tok)
{
    double v = 0;
    if (!tok.empty() && tok.front() == '+') { tok.remove_prefix(1); }
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc {} || p != tok.data() + tok.size()) { return std::nullopt; }
    return v;
}

// Lines split on commas, semicolons and whitespace; quotes stripped.
std::vector<std::vector<std::string>> tokenize(std::string const& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string tok;
    auto end_token = [&] {
        if (!tok.empty()) { row.push_back(std::move(tok)); }
        tok.clear();
    };
    for (char c : text) {
        if (c == '\n') {
            end_token();
            if (!row.empty()) { rows.push_back(std::move(row)); }
            row.clear();
        } else if (c == ',' || c == ';' || c == ' ' || c == '\t' || c == '\r') {
            end_token();
        } else if (c != '"') {
            tok += c;
        }
    }
    end_token();
    if (!row.empty()) { rows.push_back(std::move(row)); }
    return rows;
}

bool is_ole2(std::string const& bytes)
{
    static constexpr unsigned char magic[] = { 0xD0, 0xCF, 0x11, 0xE0, 0xA1, 0xB1, 0x1A, 0xE1 };
    return bytes.size() >= 8 && std::memcmp(bytes.data(), magic, 8) == 0;
}

bool is_zip(std::string const& bytes) { return bytes.size() >= 4 && bytes.compare(0, 4, "PK\x03\x04") == 0; }

// Rows of a delimited file whose cells are all numeric; header or comment
// lines are dropped.
std::vector<std::vector<double>> numeric_rows(std::string const& text)
{
    std::vector<std::vector<double>> out;
    for (auto const& toks : tokenize(text)) {
        std::vector<double> row;
        for (auto const& t : toks) {
            auto v = number(t);
            if (!v) { break; }
            row.push_back(*v);
        }
        if (row.size() == toks.size()) { out.push_back(std::move(row)); }
    }
    return out;
}

struct Table {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
};

Dataset to_dataset(KnownDataset const& spec, Table const& t)
{
    if (t.x.size() != spec.rows || (!t.x.empty() && t.x.front().size() != spec.features)) {
        throw FetchError(fmt::format("{}: converted shape {}x{} differs from the expected {}x{}", spec.name, t.x.size(),
            t.x.empty() ? 0 : t.x.front().size(), spec.rows, spec.features));
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(spec.rows), static_cast<Eigen::Index>(spec.features));
    Eigen::VectorXd y(static_cast<Eigen::Index>(spec.rows));
    for (std::size_t i = 0; i < spec.rows; ++i) {
        if (t.x[i].size() != spec.features) { throw FetchError(fmt::format("{}: ragged row {}", spec.name, i + 1)); }
        for (std::size_t j = 0; j < spec.features; ++j) { x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.x[i][j]; }
        y[static_cast<Eigen::Index>(i)] = t.y[i];
    }
    return { spec.name, std::move(x), std::move(y), spec.task };
}

// Numeric rows, label last, features as-is.
Table label_last(std::vector<std::vector<double>> rows)
{
    Table t;
    for (auto& r : rows) {
        if (r.size() < 2) { continue; }
        t.y.push_back(r.back());
        r.pop_back();
        t.x.push_back(std::move(r));
    }
    return t;
}

// Rows of tokens where the label is a class symbol; rows with a non-numeric
// attribute (such as '?') are dropped.
Table symbolic_label(std::string const& text, std::size_t skip_leading, std::string_view positive, std::string_view negative)
{
    Table t;
    for (auto const& toks : tokenize(text)) {
        if (toks.size() <= skip_leading + 1) { continue; }
        auto const& cls = toks.back();
        if (cls != positive && cls != negative) { continue; }
        std::vector<double> row;
        bool ok = true;
        for (std::size_t j = skip_leading; j + 1 < toks.size() && ok; ++j) {
            auto v = number(toks[j]);
            ok = v.has_value();
            if (ok) { row.push_back(*v); }
        }
        if (!ok) { continue; }
        t.x.push_back(std::move(row));
        t.y.push_back(cls == positive ? 1.0 : 0.0);
    }
    return t;
}

Table parkinsons(std::string const& text)
{
    auto rows = tokenize(text);
    if (rows.empty()) { throw FetchError("parks: empty download"); }
    auto const& header = rows.front();
    auto const status = std::find(header.begin(), header.end(), "status");
    if (status == header.end()) { throw FetchError("parks: no 'status' column"); }
    auto const label_col = static_cast<std::size_t>(status - header.begin());
    Table t;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::vector<double> row;
        std::optional<double> label;
        for (std::size_t j = 1; j < rows[i].size(); ++j) { // column 0 is the recording name
            auto v = number(rows[i][j]);
            if (!v) { throw FetchError(fmt::format("parks: bad cell on line {}", i + 1)); }
            if (j == label_col) {
                label = v;
            } else {
                row.push_back(*v);
            }
        }
        if (!label) { throw FetchError(fmt::format("parks: missing status on line {}", i + 1)); }
        t.x.push_back(std::move(row));
        t.y.push_back(*label);
    }
    return t;
}

Table energy(KnownDataset const& spec, std::string const& bytes)
{
    auto rows = is_zip(bytes) ? read_xlsx_numeric(bytes) : numeric_rows(bytes);
    Table t;
    for (auto const& r : rows) {
        if (r.size() < 10) { continue; }
        if (std::any_of(r.begin(), r.begin() + 10, [](double v) { return std::isnan(v); })) { continue; }
        t.x.emplace_back(r.begin(), r.begin() + 8);
        t.y.push_back(r[8 + spec.energy_target]);
    }
    return t;
}

// --- xlsx: zip container + sheet XML -------------------------------------

std::uint32_t le16(std::string const& b, std::size_t at)
{
    if (at + 2 > b.size()) { throw FetchError("xlsx: truncated archive"); }
    return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at]) | static_cast<unsigned char>(b[at + 1]) << 8);
}

std::uint32_t le32(std::string const& b, std::size_t at) { return le16(b, at) | le16(b, at + 2) << 16; }

std::optional<std::string> zip_entry(std::string const& zip, std::string_view wanted)
{
    if (zip.size() < 22) { throw FetchError("xlsx: not a zip archive"); }
    std::size_t eocd = zip.size() - 22;
    while (le32(zip, eocd) != 0x06054b50) {
        if (eocd == 0) { throw FetchError("xlsx: no zip directory"); }
        --eocd;
    }
    auto const entries = le16(zip, eocd + 10);
    std::size_t at = le32(zip, eocd + 16);
    for (std::uint32_t e = 0; e < entries; ++e) {
        if (le32(zip, at) != 0x02014b50) { throw FetchError("xlsx: corrupt zip directory"); }
        auto const method = le16(zip, at + 10);
        auto const packed = le32(zip, at + 20);
        auto const size = le32(zip, at + 24);
        auto const name_len = le16(zip, at + 28);
        auto const extra_len = le16(zip, at + 30);
        auto const comment_len = le16(zip, at + 32);
        auto const local = le32(zip, at + 42);
        std::string_view name(zip.data() + at + 46, name_len);
        at += 46 + name_len + extra_len + comment_len;
        if (name != wanted) { continue; }

        auto const data = local + 30 + le16(zip, local + 26) + le16(zip, local + 28);
        if (data + packed > zip.size()) { throw FetchError("xlsx: truncated entry"); }
        if (method == 0) { return zip.substr(data, packed); }
        if (method != 8) { throw FetchError("xlsx: unsupported compression"); }
        std::string out(size, '\0');
        z_stream zs {};
        if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) { throw FetchError("xlsx: inflate init failed"); }
        zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(zip.data() + data));
        zs.avail_in = packed;
        zs.next_out = reinterpret_cast<Bytef*>(out.data());
        zs.avail_out = size;
        auto const rc = inflate(&zs, Z_FINISH);
        inflateEnd(&zs);
        if (rc != Z_STREAM_END) { throw FetchError("xlsx: inflate failed"); }
        return out;
    }
    return std::nullopt;
}

std::string_view attribute(std::string_view tag, std::string_view name)
{
    auto const key = fmt::format(" {}=\"", name);
    auto const p = tag.find(key);
    if (p == std::string_view::npos) { return {}; }
    auto const start = p + key.size();
    return tag.substr(start, tag.find('"', start) - start);
}

} // namespace

std::vector<std::vector<double>> read_xlsx_numeric(std::string const& bytes)
{
    auto sheet = zip_entry(bytes, "xl/worksheets/sheet1.xml");
    if (!sheet) { throw FetchError("xlsx: no first worksheet"); }
    std::string_view xml(*sheet);
    auto const nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    while ((pos = xml.find("<row", pos)) != std::string_view::npos) {
        auto const row_end = xml.find("</row>", pos);
        auto const self_closed = xml.find("/>", pos);
        auto const open_end = xml.find('>', pos);
        if (open_end == std::string_view::npos) { break; }
        std::vector<double> row;
        if (row_end == std::string_view::npos || self_closed + 1 == open_end) {
            pos = open_end + 1;
            rows.push_back(row);
            continue;
        }
        auto body = xml.substr(open_end + 1, row_end - open_end - 1);
        std::size_t c = 0;
        while ((c = body.find("<c", c)) != std::string_view::npos) {
            auto const tag_end = body.find('>', c);
            auto const tag = body.substr(c, tag_end - c + 1);
            auto const ref = attribute(tag, "r");
            std::size_t col = 0;
            for (char ch : ref) {
                if (ch < 'A' || ch > 'Z') { break; }
                col = col * 26 + static_cast<std::size_t>(ch - 'A' + 1);
            }
            if (col == 0) { col = row.size() + 1; }
            if (row.size() < col) { row.resize(col, nan); }
            auto const type = attribute(tag, "t");
            bool const empty = tag.size() >= 2 && tag[tag.size() - 2] == '/';
            auto next = tag_end + 1;
            if (!empty) {
                auto const close = body.find("</c>", tag_end);
                auto const inner = body.substr(tag_end + 1, close - tag_end - 1);
                auto const v0 = inner.find("<v>");
                if ((type.empty() || type == "n") && v0 != std::string_view::npos) {
                    auto const v1 = inner.find("</v>", v0);
                    if (auto v = number(inner.substr(v0 + 3, v1 - v0 - 3))) { row[col - 1] = *v; }
                }
                next = close + 4;
            }
            c = next;
        }
        rows.push_back(std::move(row));
        pos = row_end + 6;
    }
    return rows;
}

std::vector<KnownDataset> const& known_datasets()
{
    static std::vector<KnownDataset> const registry {
        { "asn", Task::Regression, 1503, 5, std::string(uci) + "00291/airfoil_self_noise.dat", RawLayout::Airfoil },
        { "ccs", Task::Regression, 1030, 8, std::string(uci) + "concrete/compressive/Concrete_Data.xls", RawLayout::Concrete },
        { "enc", Task::Regression, 768, 8, std::string(uci) + "00242/ENB2012_data.xlsx", RawLayout::Energy, 1 },
        { "enh", Task::Regression, 768, 8, std::string(uci) + "00242/ENB2012_data.xlsx", RawLayout::Energy, 0 },
        { "bcw", Task::Classification, 683, 9, std::string(uci) + "breast-cancer-wisconsin/breast-cancer-wisconsin.data",
            RawLayout::Wisconsin },
        { "parks", Task::Classification, 195, 22, std::string(uci) + "parkinsons/parkinsons.data", RawLayout::Parkinsons },
        { "heart", Task::Classification, 270, 13, std::string(uci) + "statlog/heart/heart.dat", RawLayout::Heart },
        { "iono", Task::Classification, 351, 34, std::string(uci) + "ionosphere/ionosphere.data", RawLayout::Ionosphere },
        { "sonar", Task::Classification, 208, 60,
            std::string(uci) + "undocumented/connectionist-bench/sonar/sonar.all-data", RawLayout::Sonar },
    };
    return registry;
}

std::optional<KnownDataset> find_known(std::string_view name)
{
    auto const key = lower(name);
    for (auto const& d : known_datasets()) {
        if (d.name == key) { return d; }
    }
    return std::nullopt;
}

std::filesystem::path data_dir()
{
    if (auto const* env = std::getenv("SEGP_DATA_DIR"); env != nullptr && *env != '\0') { return env; }
    return SEGP_DEFAULT_DATA_DIR;
}

Dataset convert_raw(KnownDataset const& spec, std::string const& bytes)
{
    switch (spec.layout) {
    case RawLayout::Airfoil: return to_dataset(spec, label_last(numeric_rows(bytes)));
    case RawLayout::Concrete:
        if (is_ole2(bytes)) {
            throw FetchError("ccs: legacy .xls workbooks are not supported; pass a CSV export with --url "
                             "or place ccs.csv in the data directory");
        }
        return to_dataset(spec, label_last(numeric_rows(bytes)));
    case RawLayout::Energy: return to_dataset(spec, energy(spec, bytes));
    case RawLayout::Wisconsin: {
        Table t;
        for (auto const& toks : tokenize(bytes)) {
            if (toks.size() != 11) { continue; }
            std::vector<double> row;
            for (std::size_t j = 1; j < 10; ++j) {
                if (auto v = number(toks[j])) { row.push_back(*v); }
            }
            if (row.size() != 9 || (toks[10] != "2" && toks[10] != "4")) { continue; } // rows with '?' are dropped
            t.x.push_back(std::move(row));
            t.y.push_back(toks[10] == "4" ? 1.0 : 0.0);
        }
        return to_dataset(spec, t);
    }
    case RawLayout::Parkinsons: return to_dataset(spec, parkinsons(bytes));
    case RawLayout::Heart: return to_dataset(spec, symbolic_label(bytes, 0, "2", "1"));
    case RawLayout::Ionosphere: return to_dataset(spec, symbolic_label(bytes, 0, "g", "b"));
    case RawLayout::Sonar: return to_dataset(spec, symbolic_label(bytes, 0, "M", "R"));
    }
    throw FetchError("unknown layout");
}

namespace {

std::string download(std::string const& url)
{
    auto const scheme_end = url.find("://");
    if (scheme_end == std::string::npos) { throw FetchError(fmt::format("not an http(s) URL: {}", url)); }
    auto const path_start = url.find('/', scheme_end + 3);
    auto const base = url.substr(0, path_start);
    auto const path = path_start == std::string::npos ? std::string("/") : url.substr(path_start);

    httplib::Client client(base);
    client.set_follow_location(true);
    client.set_connection_timeout(15);
    client.set_read_timeout(60);
    auto res = client.Get(path);
    if (!res) { throw FetchError(fmt::format("download of {} failed: {}", url, httplib::to_string(res.error()))); }
    if (res->status != 200) { throw FetchError(fmt::format("download of {} failed: HTTP {}", url, res->status)); }
    return res->body;
}

} // namespace

std::filesystem::path fetch_dataset(std::string_view name, std::string const& url, std::filesystem::path const& dest)
{
    auto const spec = find_known(name);
    if (!spec) { throw FetchError(fmt::format("unknown dataset '{}'", name)); }
    auto const target = dest / (spec->name + ".csv");
    if (std::filesystem::exists(target)) { return target; }
    std::filesystem::create_directories(dest);

    Dataset ds;
    auto const bundled = data_dir() / (spec->name + ".csv");
    if (url.empty() && std::filesystem::exists(bundled)) {
        ds = load_csv(bundled, spec->task);
        if (ds.rows() != spec->rows || ds.cols() != spec->features) {
            throw FetchError(fmt::format("{}: bundled copy has shape {}x{}, expected {}x{}", spec->name, ds.rows(), ds.cols(),
                spec->rows, spec->features));
        }
    } else {
        ds = convert_raw(*spec, download(url.empty() ? spec->url : url));
    }

    auto const partial = std::filesystem::path(target).concat(".part");
    write_csv(ds, partial);
    std::filesystem::rename(partial, target);
    return target;
}

} // namespace segp
