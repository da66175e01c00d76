#include "dgasn/model_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace dgasn {

namespace {

constexpr char kMagic[8] = {'D', 'G', 'S', 'N', 'P', 'R', 'M', '1'};
constexpr uint32_t kVersion = 1;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_u32(std::ostream& f, uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); }

uint32_t read_u32(std::istream& f) {
    uint32_t v = 0;
    if (!f.read(reinterpret_cast<char*>(&v), 4)) throw IoError("truncated parameter container");
    return v;
}

}  // namespace

void save_params(const std::string& path, const ModelParams& params) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f.write(kMagic, sizeof(kMagic));
    write_u32(f, kVersion);
    uint32_t count = 0;
    params.for_each([&](const std::string&, const DenseMatrix&) { ++count; });
    write_u32(f, count);
    params.for_each([&](const std::string& name, const DenseMatrix& m) {
        write_u32(f, static_cast<uint32_t>(name.size()));
        f.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(f, static_cast<uint32_t>(m.rows));
        write_u32(f, static_cast<uint32_t>(m.cols));
    });
    params.for_each([&](const std::string&, const DenseMatrix& m) {
        f.write(reinterpret_cast<const char*>(m.data.data()),
                static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    });
    if (!f) throw IoError("write failed for " + path);
}

void load_params(const std::string& path, ModelParams& params) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    char magic[8];
    if (!f.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw IoError(path + ": not a parameter container");
    if (read_u32(f) != kVersion) throw IoError(path + ": unsupported container version");
    const uint32_t count = read_u32(f);

    std::vector<std::pair<std::string, DenseMatrix*>> tensors;
    params.for_each([&](const std::string& name, DenseMatrix& m) { tensors.emplace_back(name, &m); });
    if (count != tensors.size()) throw IoError(path + ": tensor count mismatch with configuration");

    for (auto& [name, m] : tensors) {
        const uint32_t len = read_u32(f);
        std::string stored(len, '\0');
        if (!f.read(stored.data(), len)) throw IoError("truncated parameter container");
        const uint32_t rows = read_u32(f), cols = read_u32(f);
        if (stored != name || static_cast<int>(rows) != m->rows || static_cast<int>(cols) != m->cols)
            throw IoError(path + ": shape table mismatch at tensor " + stored + " (expected " +
                          name + ")");
    }
    for (auto& [name, m] : tensors) {
        if (!f.read(reinterpret_cast<char*>(m->data.data()),
                    static_cast<std::streamsize>(m->data.size() * sizeof(double))))
            throw IoError("truncated parameter payload in " + path);
    }
}

}  // namespace dgasn
