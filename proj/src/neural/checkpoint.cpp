#include "overgaze/neural/checkpoint.hpp"

#include <cstring>

#include <json.hpp>

#include "overgaze/common/error.hpp"
#include "overgaze/common/io.hpp"

namespace og::neural {

using json = nlohmann::json;

namespace {

constexpr char kMagic[4] = {'O', 'G', 'C', 'K'};

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
    const std::vector<unsigned char>& buf;
    size_t off = 0;
    std::string where;

    void need(size_t n) {
        if (off + n > buf.size()) throw ParseError("truncated checkpoint " + where, 1);
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf[off + i]) << (8 * i);
        off += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[off + i]) << (8 * i);
        off += 8;
        return v;
    }
    std::string bytes(size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(buf.data() + off), n);
        off += n;
        return s;
    }
};

}  // namespace

std::string model_config_json(const ModelConfig& cfg) {
    json j;
    j["d_model"] = cfg.d_model;
    j["n_layers"] = cfg.n_layers;
    j["n_heads"] = cfg.n_heads;
    j["d_ff"] = cfg.d_ff;
    j["dropout_p"] = cfg.dropout_p;
    j["max_seq_len"] = cfg.max_seq_len;
    j["input_dim"] = cfg.input_dim;
    j["n_classes"] = cfg.n_classes;
    return j.dump();
}

ModelConfig model_config_from_json(const std::string& text) {
    ModelConfig cfg;
    try {
        json j = json::parse(text);
        cfg.d_model = j.at("d_model").get<int>();
        cfg.n_layers = j.at("n_layers").get<int>();
        cfg.n_heads = j.at("n_heads").get<int>();
        cfg.d_ff = j.at("d_ff").get<int>();
        cfg.dropout_p = j.at("dropout_p").get<double>();
        cfg.max_seq_len = j.at("max_seq_len").get<int>();
        cfg.input_dim = j.at("input_dim").get<int>();
        cfg.n_classes = j.at("n_classes").get<int>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad model config: ") + e.what(), 1);
    }
    return cfg;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    json header;
    header["model"] = ckpt.model;
    header["config"] = json::parse(model_config_json(ckpt.config));
    header["extra"] = ckpt.extra.empty() ? json::object() : json::parse(ckpt.extra);
    std::string hdr = header.dump();

    std::string out;
    out.append(kMagic, 4);
    put_u32(out, static_cast<uint32_t>(hdr.size()));
    out += hdr;
    put_u32(out, static_cast<uint32_t>(ckpt.blobs.size()));
    for (const auto& [name, mat] : ckpt.blobs) {
        put_u32(out, static_cast<uint32_t>(name.size()));
        out += name;
        put_u32(out, static_cast<uint32_t>(mat.rows));
        put_u32(out, static_cast<uint32_t>(mat.cols));
        for (double v : mat.v) {
            uint64_t bits;
            std::memcpy(&bits, &v, 8);
            put_u64(out, bits);
        }
    }
    atomic_write_file(path, out);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::vector<unsigned char> buf = read_binary_file(path);
    Reader r{buf, 0, path.string()};
    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw ParseError("not an OGCK checkpoint: " + path.string(), 1);
    r.off = 4;

    Checkpoint ckpt;
    std::string hdr = r.bytes(r.u32());
    try {
        json header = json::parse(hdr);
        ckpt.model = header.at("model").get<std::string>();
        ckpt.config = model_config_from_json(header.at("config").dump());
        ckpt.extra = header.at("extra").dump();
    } catch (const json::exception& e) {
        throw ParseError("bad checkpoint header in " + path.string() + ": " + e.what(), 1);
    }

    uint32_t n_blobs = r.u32();
    for (uint32_t i = 0; i < n_blobs; ++i) {
        std::string name = r.bytes(r.u32());
        uint32_t rows = r.u32(), cols = r.u32();
        if (rows == 0 || cols == 0 || static_cast<uint64_t>(rows) * cols > (1u << 28))
            throw ParseError("bad blob shape in " + path.string(), 1);
        Mat<double> m(static_cast<int>(rows), static_cast<int>(cols));
        for (double& v : m.v) {
            uint64_t bits = r.u64();
            std::memcpy(&v, &bits, 8);
        }
        ckpt.blobs.emplace_back(std::move(name), std::move(m));
    }
    if (r.off != buf.size())
        throw ParseError("trailing bytes in checkpoint " + path.string(), 1);
    return ckpt;
}

}  // namespace og::neural
