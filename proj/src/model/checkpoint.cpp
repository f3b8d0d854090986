#include "disae/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace disae::model {

namespace {

constexpr char kMagic[8] = {'D', 'I', 'S', 'A', 'E', 'C', 'K', 'P'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

std::uint64_t fnv1a(const char* data, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <typename T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

class Reader {
public:
    Reader(const std::string& s, std::size_t pos) : s_(s), pos_(pos) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, s_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::string bytes(std::size_t n) {
        need(n);
        std::string out = s_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    void doubles(double* dst, std::size_t n) {
        need(n * sizeof(double));
        std::memcpy(dst, s_.data() + pos_, n * sizeof(double));
        pos_ += n * sizeof(double);
    }

    bool done() const { return pos_ == s_.size(); }

private:
    void need(std::size_t n) const {
        if (s_.size() - pos_ < n) throw FormatError("checkpoint payload ends early");
    }

    const std::string& s_;
    std::size_t pos_;
};

void put_net(std::string& out, const nn::DenseNet& net) {
    for (const auto& l : net.layers()) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(l.W.rows()));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(l.W.cols()));
        for (Index r = 0; r < l.W.rows(); ++r)
            for (Index c = 0; c < l.W.cols(); ++c) put<double>(out, l.W(r, c));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(l.b.size()));
        for (Index i = 0; i < l.b.size(); ++i) put<double>(out, l.b(i));
    }
}

void read_net(Reader& in, nn::DenseNet& net) {
    for (auto& l : net.mutable_layers()) {
        const auto rows = in.get<std::uint32_t>();
        const auto cols = in.get<std::uint32_t>();
        if (rows != l.W.rows() || cols != l.W.cols()) throw FormatError("checkpoint weight block shape does not match its config");
        for (Index r = 0; r < l.W.rows(); ++r)
            for (Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = in.get<double>();
        const auto n = in.get<std::uint32_t>();
        if (n != l.b.size()) throw FormatError("checkpoint bias block length does not match its config");
        in.doubles(l.b.data(), n);
    }
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
    const TrainedModel& t = ckpt.trained;
    nlohmann::json meta;
    meta["config"] = t.model.config().to_json();
    meta["n_features"] = t.model.n_features();
    meta["normalization"] = {{"means", t.norm.means}, {"stds", t.norm.stds}};
    meta["history"] = t.history.to_json();
    meta["extra"] = ckpt.extra;
    const std::string text = meta.dump();

    std::string payload;
    put<std::uint64_t>(payload, text.size());
    payload += text;
    for (const auto* net : t.model.networks()) put_net(payload, *net);

    std::string out(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint64_t>(out, payload.size());
    put<std::uint64_t>(out, fnv1a(payload.data(), payload.size()));
    out += payload;
    return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
    if (bytes.size() < sizeof(kMagic) + 20 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw FormatError("not a checkpoint file (bad magic)");
    Reader header(bytes, sizeof(kMagic));
    const auto version = header.get<std::uint32_t>();
    if (version != kCheckpointVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version) + " (this build reads version " +
                          std::to_string(kCheckpointVersion) + ")");
    const auto length = header.get<std::uint64_t>();
    const auto checksum = header.get<std::uint64_t>();
    const std::size_t start = sizeof(kMagic) + 20;
    if (bytes.size() - start != length || fnv1a(bytes.data() + start, bytes.size() - start) != checksum)
        throw FormatError("checkpoint checksum mismatch: file is truncated or corrupt");

    Reader in(bytes, start);
    const auto text_len = in.get<std::uint64_t>();
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(in.bytes(text_len));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
    }

    Checkpoint ckpt;
    try {
        DisAEConfig config = DisAEConfig::from_json(meta.at("config"));
        ckpt.trained.model = DisAEModel(config, meta.at("n_features").get<int>());
        ckpt.trained.norm.means = meta.at("normalization").at("means").get<std::vector<double>>();
        ckpt.trained.norm.stds = meta.at("normalization").at("stds").get<std::vector<double>>();
        ckpt.trained.history = TrainHistory::from_json(meta.at("history"));
        ckpt.extra = meta.value("extra", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint metadata is incomplete: ") + e.what());
    }
    for (auto* net : ckpt.trained.model.networks()) read_net(in, *net);
    if (!in.done()) throw FormatError("checkpoint has trailing bytes after the last parameter block");
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const std::string bytes = serialize_checkpoint(ckpt);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open checkpoint '" + path.string() + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return deserialize_checkpoint(buf.str());
}

}  // namespace disae::model
