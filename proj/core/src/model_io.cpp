#include "gtd/model_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gtd/errors.hpp"

namespace gtd {

namespace {

using nlohmann::json;

constexpr std::string_view kBase64Chars =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out.push_back(kBase64Chars[(v >> 18) & 63]);
        out.push_back(kBase64Chars[(v >> 12) & 63]);
        out.push_back(kBase64Chars[(v >> 6) & 63]);
        out.push_back(kBase64Chars[v & 63]);
        i += 3;
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t v = bytes[i] << 16;
        out.push_back(kBase64Chars[(v >> 18) & 63]);
        out.push_back(kBase64Chars[(v >> 12) & 63]);
        out.append("==");
    } else if (rest == 2) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out.push_back(kBase64Chars[(v >> 18) & 63]);
        out.push_back(kBase64Chars[(v >> 12) & 63]);
        out.push_back(kBase64Chars[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    std::array<std::int8_t, 256> lut;
    lut.fill(-1);
    for (std::size_t i = 0; i < kBase64Chars.size(); ++i)
        lut[static_cast<std::uint8_t>(kBase64Chars[i])] = static_cast<std::int8_t>(i);

    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    std::uint32_t acc = 0;
    int bits = 0;
    for (const char c : text) {
        if (c == '=') break;
        const std::int8_t v = lut[static_cast<std::uint8_t>(c)];
        if (v < 0) throw ModelError("invalid base64 in parameter block");
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
        }
    }
    return out;
}

// Doubles as little-endian bytes regardless of host order.
std::string encode_doubles(const std::vector<double>& values) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(values.size() * 8);
    for (const double d : values) {
        const auto u = std::bit_cast<std::uint64_t>(d);
        for (int shift = 0; shift < 64; shift += 8)
            bytes.push_back(static_cast<std::uint8_t>((u >> shift) & 0xFF));
    }
    return base64_encode(bytes);
}

std::vector<double> decode_doubles(const std::string& text) {
    const auto bytes = base64_decode(text);
    if (bytes.size() % 8 != 0)
        throw ModelError("parameter block length is not a multiple of 8 bytes");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t u = 0;
        for (int b = 7; b >= 0; --b) u = (u << 8) | bytes[i * 8 + static_cast<std::size_t>(b)];
        out[i] = std::bit_cast<double>(u);
    }
    return out;
}

} // namespace

std::string corpus_fingerprint(const Corpus& c) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix = [&hash](std::string_view s) {
        for (const char ch : s) {
            hash ^= static_cast<std::uint8_t>(ch);
            hash *= 0x100000001b3ULL;
        }
        hash ^= 0x1F;
        hash *= 0x100000001b3ULL;
    };
    for (const auto& doc : c.docs()) {
        mix(doc.id);
        mix(doc.text);
        mix(doc.label ? label_name(*doc.label) : "?");
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string model_to_bytes(const Pipeline& pipeline, const ModelMetadata& meta) {
    if (!pipeline.fitted()) throw ModelError("cannot save an unfitted pipeline");

    json doc;
    doc["magic"] = "GTDM";
    doc["format_version"] = 1;
    doc["pipeline"] = json::parse(pipeline_config_to_json(pipeline.config()));

    std::vector<std::string> stopwords(pipeline.stoplist().begin(),
                                       pipeline.stoplist().end());
    std::sort(stopwords.begin(), stopwords.end());
    doc["pipeline"]["stopwords"] = stopwords;

    const Vocabulary& vocab = pipeline.vocabulary();
    doc["vocabulary"] = {{"tokens", vocab.tokens},
                         {"doc_freq", vocab.doc_freq},
                         {"n_docs", vocab.n_docs}};

    NamedTensorMap params;
    pipeline.save_params(params);
    json blocks = json::object();
    for (const auto& [name, block] : params) {
        blocks[name] = {{"shape", block.shape}, {"data", encode_doubles(block.data)}};
    }
    doc["parameters"] = blocks;

    json md;
    md["seed"] = meta.seed;
    md["corpus_fingerprint"] = meta.corpus_fingerprint;
    md["trained_docs"] = meta.trained_docs;
    if (meta.timestamp) md["timestamp"] = *meta.timestamp;
    doc["metadata"] = md;

    return doc.dump(2) + "\n";
}

void save_model_file(const Pipeline& pipeline, const ModelMetadata& meta,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file \"" + path + "\"");
    out << model_to_bytes(pipeline, meta);
}

LoadedModel model_from_bytes(const std::string& bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ModelError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object() || doc.value("magic", "") != "GTDM")
            throw ModelError("not a GTDM model file");
        if (doc.value("format_version", 0) != 1)
            throw ModelError("unsupported model format version");

        json pipeline_json = doc.at("pipeline");
        Stoplist stoplist;
        if (pipeline_json.contains("stopwords")) {
            for (const auto& w : pipeline_json["stopwords"])
                stoplist.insert(w.get<std::string>());
            pipeline_json.erase("stopwords");
        }
        const PipelineConfig cfg = parse_pipeline_config(pipeline_json.dump());

        Vocabulary vocab;
        const json& vj = doc.at("vocabulary");
        vocab.tokens = vj.at("tokens").get<std::vector<std::string>>();
        vocab.doc_freq = vj.at("doc_freq").get<std::vector<std::uint32_t>>();
        vocab.n_docs = vj.at("n_docs").get<std::size_t>();
        if (vocab.tokens.size() != vocab.doc_freq.size())
            throw ModelError("vocabulary token/df length mismatch");
        for (std::size_t i = 0; i < vocab.tokens.size(); ++i)
            vocab.index.emplace(vocab.tokens[i], static_cast<std::uint32_t>(i));

        NamedTensorMap params;
        for (const auto& [name, block] : doc.at("parameters").items()) {
            NamedBlock nb;
            nb.shape = block.at("shape").get<std::vector<std::size_t>>();
            nb.data = decode_doubles(block.at("data").get<std::string>());
            std::size_t expected = 1;
            for (const std::size_t s : nb.shape) expected *= s;
            if (expected != nb.data.size())
                throw ModelError("parameter \"" + name + "\" shape/data mismatch");
            params.emplace(name, std::move(nb));
        }

        ModelMetadata meta;
        const json& md = doc.at("metadata");
        meta.seed = md.at("seed").get<std::uint64_t>();
        meta.corpus_fingerprint = md.at("corpus_fingerprint").get<std::string>();
        meta.trained_docs = md.at("trained_docs").get<std::size_t>();
        if (md.contains("timestamp")) meta.timestamp = md["timestamp"].get<std::string>();

        LoadedModel loaded{Pipeline(cfg, std::move(stoplist)), meta};
        loaded.pipeline.load_params(params, std::move(vocab));
        return loaded;
    } catch (const ModelError&) {
        throw;
    } catch (const std::exception& e) {
        throw ModelError(std::string("corrupt model file: ") + e.what());
    }
}

LoadedModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file \"" + path + "\"");
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_bytes(buf.str());
}

} // namespace gtd
