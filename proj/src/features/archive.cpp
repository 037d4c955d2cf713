#include "overgaze/features/archive.hpp"

#include <cstring>

#include <json.hpp>

#include "overgaze/common/error.hpp"
#include "overgaze/common/io.hpp"

namespace og::features {

using json = nlohmann::json;

namespace {

constexpr char kMagic[4] = {'O', 'G', 'T', '1'};

void put_u32(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t get_u32(const std::vector<unsigned char>& buf, size_t off) {
    return static_cast<uint32_t>(buf[off]) | static_cast<uint32_t>(buf[off + 1]) << 8 |
           static_cast<uint32_t>(buf[off + 2]) << 16 | static_cast<uint32_t>(buf[off + 3]) << 24;
}

}  // namespace

void write_tensor(const std::filesystem::path& path, const std::vector<int>& shape,
                  const std::vector<double>& data) {
    size_t expect = 1;
    for (int d : shape) {
        if (d <= 0) throw ValidationError("tensor.shape", "non-positive dimension");
        expect *= static_cast<size_t>(d);
    }
    if (expect != data.size())
        throw ValidationError("tensor", "shape does not match the element count");

    std::string out;
    out.reserve(8 + 4 * shape.size() + 4 * data.size());
    out.append(kMagic, 4);
    put_u32(out, static_cast<uint32_t>(shape.size()));
    for (int d : shape) put_u32(out, static_cast<uint32_t>(d));
    for (double v : data) {
        float f = static_cast<float>(v);
        uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(out, bits);
    }
    atomic_write_file(path, out);
}

Tensor read_tensor(const std::filesystem::path& path) {
    std::vector<unsigned char> buf = read_binary_file(path);
    if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw ParseError("not an OGT1 tensor: " + path.string(), 1);
    uint32_t ndim = get_u32(buf, 4);
    if (ndim == 0 || ndim > 8 || buf.size() < 8 + 4 * static_cast<size_t>(ndim))
        throw ParseError("bad tensor rank in " + path.string(), 1);

    Tensor t;
    size_t count = 1;
    for (uint32_t i = 0; i < ndim; ++i) {
        uint32_t d = get_u32(buf, 8 + 4 * i);
        if (d == 0 || d > 1u << 24) throw ParseError("bad tensor dimension in " + path.string(), 1);
        t.shape.push_back(static_cast<int>(d));
        count *= d;
    }
    size_t off = 8 + 4 * static_cast<size_t>(ndim);
    if (buf.size() != off + 4 * count)
        throw ParseError("tensor payload size mismatch in " + path.string(), 1);
    t.data.resize(count);
    for (size_t i = 0; i < count; ++i) {
        uint32_t bits = get_u32(buf, off + 4 * i);
        std::memcpy(&t.data[i], &bits, 4);
    }
    return t;
}

std::string FeatureMeta::key() const {
    return participant_id + "/" + std::to_string(trial_id) + "/" + kind + "/" +
           std::to_string(window.start_t) + "+" + std::to_string(window.length);
}

void write_feature(const std::filesystem::path& base, const Representation& rep,
                   const FeatureMeta& meta) {
    std::filesystem::path tensor_path = base;
    tensor_path += ".ogt";
    write_tensor(tensor_path, rep.shape, rep.data);

    json j;
    j["participant_id"] = meta.participant_id;
    j["trial_id"] = meta.trial_id;
    j["layout"] = meta.layout;
    j["agent"] = meta.agent;
    j["kind"] = meta.kind;
    j["window"] = {{"start_t", meta.window.start_t}, {"length", meta.window.length}};
    j["labels"] = {{"trust", meta.trust}, {"proficiency", meta.proficiency},
                   {"intent", meta.intent}};
    std::filesystem::path json_path = base;
    json_path += ".json";
    atomic_write_file(json_path, j.dump(2) + "\n");
}

Feature read_feature(const std::filesystem::path& base) {
    std::filesystem::path tensor_path = base, json_path = base;
    tensor_path += ".ogt";
    json_path += ".json";

    Feature f;
    f.tensor = read_tensor(tensor_path);
    json j;
    try {
        j = json::parse(read_text_file(json_path));
        f.meta.participant_id = j.at("participant_id").get<std::string>();
        f.meta.trial_id = j.at("trial_id").get<int>();
        f.meta.layout = j.at("layout").get<std::string>();
        f.meta.agent = j.at("agent").get<std::string>();
        f.meta.kind = j.at("kind").get<std::string>();
        f.meta.window.start_t = j.at("window").at("start_t").get<int>();
        f.meta.window.length = j.at("window").at("length").get<int>();
        f.meta.trust = j.at("labels").at("trust").get<int>();
        f.meta.proficiency = j.at("labels").at("proficiency").get<int>();
        f.meta.intent = j.at("labels").at("intent").get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw ParseError("bad feature sidecar " + json_path.string() + ": " + e.what(), 1);
    }
    return f;
}

}  // namespace og::features
