#include "pisac/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace pisac {
namespace {

constexpr char kMagic[8] = {'P', 'I', 'S', 'A', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

uint64_t fnv1a(const unsigned char* data, size_t n, uint64_t hash = 0xcbf29ce484222325ULL) {
    for (size_t i = 0; i < n; ++i) {
        hash ^= data[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

void append(std::string& buf, const void* data, size_t n) {
    buf.append(static_cast<const char*>(data), n);
}

template <typename T>
void append_value(std::string& buf, T value) {
    append(buf, &value, sizeof(T));
}

template <typename T>
T read_value(const std::string& buf, size_t& off) {
    if (off + sizeof(T) > buf.size()) throw std::runtime_error("checkpoint truncated");
    T value;
    std::memcpy(&value, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return value;
}

}  // namespace

CheckpointMap to_checkpoint(const ParamStore& params) {
    CheckpointMap map;
    map.reserve(static_cast<size_t>(params.size()));
    for (const auto& p : params.all()) map.emplace_back(p.name, p.value);
    return map;
}

void from_checkpoint(ParamStore& params, const CheckpointMap& map) {
    if (static_cast<int>(map.size()) != params.size())
        throw std::runtime_error("checkpoint entry count differs from the parameter set");
    for (int i = 0; i < params.size(); ++i) {
        const auto& [name, value] = map[static_cast<size_t>(i)];
        auto& p = params[i];
        if (p.name != name)
            throw std::runtime_error("checkpoint name mismatch: expected " + p.name + ", got " + name);
        if (!p.value.same_shape(value))
            throw std::runtime_error("checkpoint shape mismatch for " + name);
        p.value = value;
    }
}

void write_checkpoint(const CheckpointMap& map, const std::string& path) {
    std::string buf;
    append(buf, kMagic, sizeof(kMagic));
    append_value(buf, kVersion);
    append_value(buf, static_cast<uint32_t>(map.size()));
    for (const auto& [name, matrix] : map) {
        append_value(buf, static_cast<uint32_t>(name.size()));
        append(buf, name.data(), name.size());
        append_value(buf, static_cast<uint32_t>(matrix.rows));
        append_value(buf, static_cast<uint32_t>(matrix.cols));
        append(buf, matrix.data.data(), matrix.data.size() * sizeof(double));
    }
    append_value(buf, fnv1a(reinterpret_cast<const unsigned char*>(buf.data()), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

CheckpointMap read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < sizeof(kMagic) + 2 * sizeof(uint32_t) + sizeof(uint64_t))
        throw std::runtime_error("checkpoint truncated");
    if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a checkpoint file: bad magic");

    const size_t body = buf.size() - sizeof(uint64_t);
    uint64_t stored;
    std::memcpy(&stored, buf.data() + body, sizeof(stored));
    if (fnv1a(reinterpret_cast<const unsigned char*>(buf.data()), body) != stored)
        throw std::runtime_error("checkpoint integrity check failed");

    size_t off = sizeof(kMagic);
    const uint32_t version = read_value<uint32_t>(buf, off);
    if (version != kVersion)
        throw std::runtime_error("checkpoint version mismatch: file has " +
                                 std::to_string(version) + ", expected " + std::to_string(kVersion));

    const uint32_t count = read_value<uint32_t>(buf, off);
    CheckpointMap map;
    map.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t name_len = read_value<uint32_t>(buf, off);
        if (off + name_len > body) throw std::runtime_error("checkpoint truncated");
        std::string name(buf.data() + off, name_len);
        off += name_len;
        const uint32_t rows = read_value<uint32_t>(buf, off);
        const uint32_t cols = read_value<uint32_t>(buf, off);
        const size_t bytes = static_cast<size_t>(rows) * cols * sizeof(double);
        if (off + bytes > body) throw std::runtime_error("checkpoint truncated");
        Matrix m(static_cast<int>(rows), static_cast<int>(cols));
        std::memcpy(m.data.data(), buf.data() + off, bytes);
        off += bytes;
        map.emplace_back(std::move(name), std::move(m));
    }
    return map;
}

}  // namespace pisac
