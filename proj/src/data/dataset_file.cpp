#include "loadgen/data/dataset_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "loadgen/errors.hpp"

namespace loadgen::data {

static_assert(std::endian::native == std::endian::little, "dataset files assume a little-endian host");

namespace {

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void put_array(std::ostream& out, std::span<const T> v) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("dataset file is truncated");
    return v;
}

template <typename T>
void get_array(std::istream& in, std::span<T> v) {
    if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size_bytes())))
        throw FormatError("dataset file is truncated");
}

}  // namespace

std::vector<std::string> Dataset::users() const {
    if (!metadata.contains("users")) return {};
    return metadata.at("users").get<std::vector<std::string>>();
}

double Dataset::scale_kw() const { return metadata.value("scale_kw", 100.0); }

ConditionVector Dataset::condition(std::size_t row) const {
    return {conditions(row, 0), conditions(row, 1), conditions(row, 2)};
}

Dataset Dataset::subset(Split label) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < size(); ++i)
        if (split[i] == label) idx.push_back(i);
    return rows(idx);
}

Dataset Dataset::rows(std::span<const std::size_t> indices) const {
    Dataset out;
    out.metadata = metadata;
    out.user_index.reserve(indices.size());
    for (auto i : indices) {
        out.user_index.push_back(user_index[i]);
        out.date.push_back(date[i]);
        out.split.push_back(split[i]);
    }
    out.conditions = nn::gather_rows(conditions, indices);
    out.values = nn::gather_rows(values, indices);
    if (indices.empty()) {
        out.conditions = nn::Matrix(0, conditions.cols());
        out.values = nn::Matrix(0, values.cols());
    }
    return out;
}

void Dataset::validate() const {
    const auto n = size();
    if (date.size() != n || split.size() != n || conditions.rows() != n || values.rows() != n)
        throw FormatError("dataset columns have inconsistent lengths");
    if (n > 0 && conditions.cols() != ConditionVector::kDim)
        throw FormatError("dataset conditions must have 3 columns");
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
    ds.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write dataset " + path.string());
    out.write(kDatasetMagic, sizeof kDatasetMagic);
    const std::string meta = ds.metadata.dump();
    put<std::uint64_t>(out, meta.size());
    out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    put<std::uint64_t>(out, ds.size());
    put<std::uint64_t>(out, ds.values.cols());
    put_array<std::uint32_t>(out, ds.user_index);
    put_array<std::int32_t>(out, ds.date);
    std::vector<std::uint8_t> labels(ds.split.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<std::uint8_t>(ds.split[i]);
    put_array<std::uint8_t>(out, labels);
    put_array<double>(out, ds.conditions.values());
    put_array<double>(out, ds.values.values());
    if (!out) throw DataError("failed writing dataset " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read dataset " + path.string());
    char magic[sizeof kDatasetMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kDatasetMagic, sizeof magic) != 0)
        throw FormatError(path.string() + " is not a loadgen dataset file");
    Dataset ds;
    const auto meta_len = get<std::uint64_t>(in);
    std::string meta(meta_len, '\0');
    if (!in.read(meta.data(), static_cast<std::streamsize>(meta_len))) throw FormatError("dataset file is truncated");
    try {
        ds.metadata = nlohmann::json::parse(meta);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("dataset metadata is not valid JSON: ") + e.what());
    }
    const auto n = get<std::uint64_t>(in);
    const auto d = get<std::uint64_t>(in);
    ds.user_index.resize(n);
    ds.date.resize(n);
    std::vector<std::uint8_t> labels(n);
    get_array<std::uint32_t>(in, ds.user_index);
    get_array<std::int32_t>(in, ds.date);
    get_array<std::uint8_t>(in, labels);
    ds.split.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] > 2) throw FormatError("dataset has an invalid split label");
        ds.split[i] = static_cast<Split>(labels[i]);
    }
    ds.conditions = nn::Matrix(n, ConditionVector::kDim);
    ds.values = nn::Matrix(n, d);
    get_array<double>(in, ds.conditions.values());
    get_array<double>(in, ds.values.values());
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("dataset file has trailing bytes");
    return ds;
}

}  // namespace loadgen::data
