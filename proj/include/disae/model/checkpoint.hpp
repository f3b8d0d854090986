#pragma once

#include "disae/model/trainer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace disae::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout (little endian):
//   "DISAECKP" | u32 version | u64 payload bytes | u64 FNV-1a of payload | payload
// payload = u64 json bytes | json (config, norm stats, history, extra)
//           | per network, per layer: u32 rows, u32 cols, W row-major, u32 n, b
struct Checkpoint {
    TrainedModel trained;
    nlohmann::json extra = nlohmann::json::object();  // seeds, provenance
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace disae::model
