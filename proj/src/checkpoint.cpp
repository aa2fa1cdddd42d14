#include "las/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

namespace las {

namespace {

constexpr char kMagic[8] = {'L', 'A', 'S', 'D', 'D', 'P', 'G', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_i64(std::string& out, std::int64_t v) {
  const auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

void put_f64_array(std::string& out, const AlignedVec& values) {
  for (double v : values) put_f64(out, v);
}

class Reader {
 public:
  Reader(const std::string& data) : data_(data) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[at_ + i])) << (8 * i);
    at_ += 4;
    return v;
  }

  std::int64_t i64() {
    std::uint64_t u = 0;
    need(8);
    for (int i = 0; i < 8; ++i)
      u |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[at_ + i])) << (8 * i);
    at_ += 8;
    return static_cast<std::int64_t>(u);
  }

  double f64() {
    std::uint64_t bits = 0;
    need(8);
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[at_ + i])) << (8 * i);
    at_ += 8;
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  AlignedVec f64_array(std::size_t n) {
    AlignedVec out(n);
    for (auto& v : out) v = f64();
    return out;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string out = data_.substr(at_, n);
    at_ += n;
    return out;
  }

  bool exhausted() const { return at_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (at_ + n > data_.size()) throw std::runtime_error("checkpoint: truncated file");
  }
  const std::string& data_;
  std::size_t at_ = 0;
};

nlohmann::json architecture_header(const DdpgAgent& agent) {
  return nlohmann::json{
      {"obs_dim", agent.config().obs_dim},
      {"act_dim", agent.config().act_dim},
      {"hidden", agent.config().hidden},
      {"actor_params", agent.actor().params().size()},
      {"critic_params", agent.critic().params().size()},
  };
}

}  // namespace

void save_checkpoint(const DdpgAgent& agent, const std::string& path) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);

  const std::string header = architecture_header(agent).dump();
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out += header;

  put_f64_array(out, agent.actor().params());
  put_f64_array(out, agent.critic().params());
  put_f64_array(out, agent.actor_target().params());
  put_f64_array(out, agent.critic_target().params());
  put_f64_array(out, agent.actor_adam().m);
  put_f64_array(out, agent.actor_adam().v);
  put_i64(out, agent.actor_adam().step);
  put_f64_array(out, agent.critic_adam().m);
  put_f64_array(out, agent.critic_adam().v);
  put_i64(out, agent.critic_adam().step);
  put_f64(out, agent.noise().sigma);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("checkpoint: write failed for " + path);
}

void load_checkpoint(DdpgAgent& agent, const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

  Reader reader(data);
  if (reader.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
    throw std::runtime_error("checkpoint: bad magic in " + path);
  if (reader.u32() != kVersion)
    throw std::runtime_error("checkpoint: unsupported version in " + path);

  const std::uint32_t header_len = reader.u32();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(reader.bytes(header_len));
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error("checkpoint: corrupt header in " + path);
  }
  if (header != architecture_header(agent))
    throw std::runtime_error("checkpoint: architecture mismatch in " + path);

  const std::size_t actor_n = agent.actor().params().size();
  const std::size_t critic_n = agent.critic().params().size();

  // Stage everything before committing so a truncated file leaves the agent
  // untouched.
  auto actor = reader.f64_array(actor_n);
  auto critic = reader.f64_array(critic_n);
  auto actor_target = reader.f64_array(actor_n);
  auto critic_target = reader.f64_array(critic_n);
  auto actor_m = reader.f64_array(actor_n);
  auto actor_v = reader.f64_array(actor_n);
  auto actor_step = reader.i64();
  auto critic_m = reader.f64_array(critic_n);
  auto critic_v = reader.f64_array(critic_n);
  auto critic_step = reader.i64();
  auto sigma = reader.f64();
  if (!reader.exhausted()) throw std::runtime_error("checkpoint: trailing bytes in " + path);

  agent.actor().params() = std::move(actor);
  agent.critic().params() = std::move(critic);
  agent.actor_target().params() = std::move(actor_target);
  agent.critic_target().params() = std::move(critic_target);
  agent.actor_adam().m = std::move(actor_m);
  agent.actor_adam().v = std::move(actor_v);
  agent.actor_adam().step = actor_step;
  agent.critic_adam().m = std::move(critic_m);
  agent.critic_adam().v = std::move(critic_v);
  agent.critic_adam().step = critic_step;
  agent.noise_state().sigma = sigma;
}

}  // namespace las
