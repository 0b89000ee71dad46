#include "curla/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace curla {
namespace {

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return value;
}

std::vector<int> to_int_sizes(const std::vector<std::uint64_t>& sizes) {
  std::vector<int> out;
  out.reserve(sizes.size());
  for (auto s : sizes) out.push_back(static_cast<int>(s));
  return out;
}

const CheckpointSection& find_section(
    const std::vector<CheckpointSection>& sections, const std::string& name) {
  for (const auto& s : sections)
    if (s.name == name) return s;
  throw std::runtime_error("checkpoint: missing section " + name);
}

Mlp mlp_from_section(const CheckpointSection& section) {
  Mlp net(to_int_sizes(section.sizes));
  if (net.param_count() != section.data.size())
    throw std::runtime_error("checkpoint: parameter count mismatch in " +
                             section.name);
  net.params() = section.data;
  return net;
}

}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<CheckpointSection>& sections) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_pod(out, kCheckpointVersion);
  write_pod(out, static_cast<std::uint32_t>(sections.size()));
  for (const auto& section : sections) {
    write_pod(out, static_cast<std::uint32_t>(section.name.size()));
    out.write(section.name.data(),
              static_cast<std::streamsize>(section.name.size()));
    write_pod(out, static_cast<std::uint32_t>(section.sizes.size()));
    for (auto s : section.sizes) write_pod(out, s);
    write_pod(out, static_cast<std::uint64_t>(section.data.size()));
    out.write(reinterpret_cast<const char*>(section.data.data()),
              static_cast<std::streamsize>(section.data.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::vector<CheckpointSection> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version");

  std::vector<CheckpointSection> sections(read_pod<std::uint32_t>(in));
  for (auto& section : sections) {
    section.name.resize(read_pod<std::uint32_t>(in));
    in.read(section.name.data(),
            static_cast<std::streamsize>(section.name.size()));
    section.sizes.resize(read_pod<std::uint32_t>(in));
    for (auto& s : section.sizes) s = read_pod<std::uint64_t>(in);
    section.data.resize(read_pod<std::uint64_t>(in));
    in.read(reinterpret_cast<char*>(section.data.data()),
            static_cast<std::streamsize>(section.data.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
  }
  return sections;
}

void save_policy_checkpoint(const std::string& path,
                            const GaussianPolicy& policy,
                            const ValueFunction& value_fn) {
  std::vector<CheckpointSection> sections(3);
  sections[0].name = "policy.mean_net";
  for (int s : policy.mean_net.layer_sizes())
    sections[0].sizes.push_back(static_cast<std::uint64_t>(s));
  sections[0].data = policy.mean_net.params();
  sections[1].name = "policy.log_std";
  sections[1].sizes = {static_cast<std::uint64_t>(policy.log_std.size())};
  sections[1].data = policy.log_std;
  sections[2].name = "value.net";
  for (int s : value_fn.net.layer_sizes())
    sections[2].sizes.push_back(static_cast<std::uint64_t>(s));
  sections[2].data = value_fn.net.params();
  save_checkpoint(path, sections);
}

void load_policy_checkpoint(const std::string& path, GaussianPolicy& policy,
                            ValueFunction& value_fn) {
  const auto sections = load_checkpoint(path);
  policy.mean_net = mlp_from_section(find_section(sections, "policy.mean_net"));
  policy.log_std = find_section(sections, "policy.log_std").data;
  value_fn.net = mlp_from_section(find_section(sections, "value.net"));
}

void save_vae_checkpoint(const std::string& path, const VaeParams& params) {
  std::vector<CheckpointSection> sections(3);
  sections[0].name = "vae.encoder";
  for (int s : params.encoder.layer_sizes())
    sections[0].sizes.push_back(static_cast<std::uint64_t>(s));
  sections[0].data = params.encoder.params();
  sections[1].name = "vae.decoder";
  for (int s : params.decoder.layer_sizes())
    sections[1].sizes.push_back(static_cast<std::uint64_t>(s));
  sections[1].data = params.decoder.params();
  sections[2].name = "vae.meta";
  sections[2].data = {params.config.kl_beta, params.config.learning_rate,
                      static_cast<double>(params.config.batch_size)};
  save_checkpoint(path, sections);
}

VaeParams load_vae_checkpoint(const std::string& path) {
  const auto sections = load_checkpoint(path);
  VaeParams params;
  params.encoder = mlp_from_section(find_section(sections, "vae.encoder"));
  params.decoder = mlp_from_section(find_section(sections, "vae.decoder"));
  const auto& meta = find_section(sections, "vae.meta").data;
  if (meta.size() != 3) throw std::runtime_error("checkpoint: bad vae.meta");

  const auto& enc = params.encoder.layer_sizes();
  const auto& dec = params.decoder.layer_sizes();
  params.config.input_dim = enc.front();
  params.config.z_dim = dec.front();
  if (enc.back() != 2 * params.config.z_dim || dec.back() != params.config.input_dim)
    throw std::runtime_error("checkpoint: inconsistent vae layer sizes");
  params.config.encoder_hidden.assign(enc.begin() + 1, enc.end() - 1);
  params.config.decoder_hidden.assign(dec.begin() + 1, dec.end() - 1);
  params.config.kl_beta = meta[0];
  params.config.learning_rate = meta[1];
  params.config.batch_size = static_cast<int>(meta[2]);
  return params;
}

}  // namespace curla
