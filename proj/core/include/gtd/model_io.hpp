#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gtd/pipeline.hpp"

namespace gtd {

struct ModelMetadata {
    std::uint64_t seed = 0;
    std::string corpus_fingerprint;
    std::size_t trained_docs = 0;
    // Omitted entirely under --no-meta so identical runs produce identical
    // bytes.
    std::optional<std::string> timestamp;
};

// FNV-1a 64 over ids, texts and labels; hex string.
std::string corpus_fingerprint(const Corpus& c);

// Serializes a fitted pipeline to the GTDM format (JSON document, version 1;
// parameters as base64 little-endian IEEE-754 doubles). Writing the same
// fitted state twice yields identical bytes.
std::string model_to_bytes(const Pipeline& pipeline, const ModelMetadata& meta);
void save_model_file(const Pipeline& pipeline, const ModelMetadata& meta,
                     const std::string& path);

struct LoadedModel {
    Pipeline pipeline;
    ModelMetadata meta;
};

// Throws ModelError on anything malformed (bad magic, version, base64,
// missing blocks).
LoadedModel model_from_bytes(const std::string& bytes);
LoadedModel load_model_file(const std::string& path);

} // namespace gtd
