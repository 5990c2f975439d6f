#include "haps/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "haps/errors.hpp"

namespace haps {

namespace {

constexpr const char* kMagic = "haps-ppo-checkpoint";
constexpr int kVersion = 1;

void write_tensor(std::ostream& os, const std::string& name, const MatX& m) {
  os << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%a", m.data()[i]);
    os << buf << (i + 1 == m.size() ? '\n' : ' ');
  }
  if (m.size() == 0) os << '\n';
}

void read_tensor(std::istream& is, const std::string& name, MatX& m) {
  std::string tag, got;
  Eigen::Index rows = -1, cols = -1;
  if (!(is >> tag >> got >> rows >> cols) || tag != "tensor")
    throw ConfigError("checkpoint: malformed tensor header before " + name);
  if (got != name || rows != m.rows() || cols != m.cols())
    throw ConfigError("checkpoint: tensor " + got + " is " + std::to_string(rows) +
                      "x" + std::to_string(cols) + ", expected " + name + " " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  std::string token;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!(is >> token)) throw ConfigError("checkpoint: truncated tensor " + name);
    char* end = nullptr;
    m.data()[i] = std::strtod(token.c_str(), &end);
    if (end == token.c_str()) throw ConfigError("checkpoint: bad value in " + name);
  }
}

template <class Fn>
void for_each_tensor(nn::Mlp<double>& net, const std::string& prefix, Fn fn) {
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string base = prefix + "." + std::to_string(l);
    fn(base + ".weight", layers[l].weight);
    MatX b = layers[l].bias;
    fn(base + ".bias", b);
    layers[l].bias = b.col(0);
  }
}

}  // namespace

void save_checkpoint(const std::string& path, const PolicyParams& params,
                     const CheckpointMeta& meta) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write checkpoint " + path);
  os << kMagic << ' ' << kVersion << '\n';
  os << "schema " << meta.schema << '\n';
  os << "fingerprint " << meta.fingerprint << '\n';
  os << "activation " << nn::activation_name(params.actor.activation()) << '\n';
  os << "action_space " << params.space.num_haps << ' ';
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", params.space.r_max);
  os << buf << '\n';
  PolicyParams copy = params;
  for_each_tensor(copy.actor, "actor", [&](const std::string& n, MatX& m) { write_tensor(os, n, m); });
  for_each_tensor(copy.critic, "critic", [&](const std::string& n, MatX& m) { write_tensor(os, n, m); });
  os << "end\n";
  if (!os) throw ConfigError("failed writing checkpoint " + path);
}

PolicyParams load_checkpoint(const std::string& path, PolicyParams expected,
                             const CheckpointMeta& meta) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read checkpoint " + path);
  std::string magic, key, value;
  int version = 0;
  if (!(is >> magic >> version) || magic != kMagic)
    throw ConfigError(path + " is not a checkpoint");
  if (version != kVersion)
    throw ConfigError("unsupported checkpoint version " + std::to_string(version));
  if (!(is >> key >> value) || key != "schema" || value != meta.schema)
    throw ConfigError("checkpoint schema hash " + value + " does not match " + meta.schema);
  if (!(is >> key >> value) || key != "fingerprint" || value != meta.fingerprint)
    throw ConfigError("checkpoint config fingerprint " + value +
                      " does not match " + meta.fingerprint);
  if (!(is >> key >> value) || key != "activation" ||
      value != nn::activation_name(expected.actor.activation()))
    throw ConfigError("checkpoint activation mismatch");
  int num_haps = 0;
  std::string r_max;
  if (!(is >> key >> num_haps >> r_max) || key != "action_space" ||
      num_haps != expected.space.num_haps ||
      std::strtod(r_max.c_str(), nullptr) != expected.space.r_max)
    throw ConfigError("checkpoint action space mismatch");
  for_each_tensor(expected.actor, "actor", [&](const std::string& n, MatX& m) { read_tensor(is, n, m); });
  for_each_tensor(expected.critic, "critic", [&](const std::string& n, MatX& m) { read_tensor(is, n, m); });
  if (!(is >> key) || key != "end") throw ConfigError("checkpoint: trailing data or missing end");
  if (!expected.flat().allFinite()) throw ConfigError("checkpoint holds non-finite weights");
  return expected;
}

}  // namespace haps
