#include <socmap/cli/manifest.hpp>

#include <socmap/error.hpp>

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fmt/format.h>
#include <fstream>
#include <memory>

#ifndef SOCMAP_VERSION
#define SOCMAP_VERSION "unknown"
#endif

namespace socmap::cli {
namespace {

namespace fs = std::filesystem;

class digest {
 public:
  digest() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw numeric_error("SHA-256 unavailable");
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), out.data(), &len);
    std::string s;
    for (unsigned int i = 0; i < len; ++i) s += fmt::format("{:02x}", out[i]);
    return s;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

nlohmann::ordered_json file_entry(const fs::path& path, const fs::path& shown) {
  return {{"path", shown.generic_string()}, {"sha256", sha256_file(path)}};
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  digest d;
  d.update(bytes.data(), bytes.size());
  return d.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot read " + path.string() + " for hashing");
  digest d;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

fs::path write_manifest(const fs::path& dir, const manifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["version"] = SOCMAP_VERSION;
  j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
  j["config"] = m.config ? file_entry(*m.config, m.config->filename()) : nlohmann::ordered_json(nullptr);
  auto settings = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.settings) settings[k] = v;
  j["settings"] = settings;
  auto inputs = nlohmann::ordered_json::array();
  for (const auto& p : m.inputs) inputs.push_back(file_entry(p, p.filename()));
  j["inputs"] = inputs;
  auto outputs = nlohmann::ordered_json::array();
  for (const auto& p : m.outputs) outputs.push_back(file_entry(p, p.lexically_relative(dir)));
  j["outputs"] = outputs;

  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  return path;
}

}  // namespace socmap::cli
