#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "curla/policy.hpp"
#include "curla/vae.hpp"

namespace curla {

// Versioned flat binary of 64-bit floats: 8-byte magic, u32 version, then
// named sections each carrying a layer-size list and a parameter block.
struct CheckpointSection {
  std::string name;
  std::vector<std::uint64_t> sizes;
  std::vector<double> data;
};

inline constexpr char kCheckpointMagic[8] = {'C', 'U', 'R', 'L',
                                             'A', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path,
                     const std::vector<CheckpointSection>& sections);
std::vector<CheckpointSection> load_checkpoint(const std::string& path);

void save_policy_checkpoint(const std::string& path,
                            const GaussianPolicy& policy,
                            const ValueFunction& value_fn);
void load_policy_checkpoint(const std::string& path, GaussianPolicy& policy,
                            ValueFunction& value_fn);

void save_vae_checkpoint(const std::string& path, const VaeParams& params);
VaeParams load_vae_checkpoint(const std::string& path);

}  // namespace curla
