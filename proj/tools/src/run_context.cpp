#include "run_context.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <memory>

#include "hurstarb/error.hpp"

namespace hurstarb::cli {

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunContext::RunContext(std::string command, std::vector<std::string> args, fs::path out)
    : command_(std::move(command)), args_(std::move(args)), out_(fs::absolute(std::move(out))), started_(utc_now()) {
  if (out_.filename().empty()) out_ = out_.parent_path();
  if (fs::exists(out_) && !fs::is_directory(out_)) throw std::invalid_argument("--out is not a directory: " + out_.string());
  staging_ = out_.parent_path() / ("." + out_.filename().string() + ".staging-" + std::to_string(::getpid()));
  fs::remove_all(staging_);
  fs::create_directories(staging_);
}

RunContext::~RunContext() {
  std::error_code ec;
  fs::remove_all(staging_, ec);
}

const fs::path& RunContext::input(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw DataError("input file not found: " + p.string());
  inputs_.push_back({{"path", fs::absolute(p).lexically_normal().string()}, {"sha256", sha256_file(p)}});
  return p;
}

void RunContext::input_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) input(f);
}

std::ofstream RunContext::output(const std::string& relative) {
  const fs::path p = staging_ / relative;
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out.precision(17);
  outputs_.push_back(relative);
  return out;
}

void RunContext::write_json(const std::string& relative, const nlohmann::json& j) {
  auto out = output(relative);
  out << j.dump(2) << '\n';
}

void RunContext::commit() {
  nlohmann::json outputs = nlohmann::json::array();
  std::sort(outputs_.begin(), outputs_.end());
  for (const auto& o : outputs_) outputs.push_back({{"path", o}, {"sha256", sha256_file(staging_ / o)}});
  nlohmann::json m;
  m["tool"] = "hurstarb";
  m["version"] = HURSTARB_VERSION;
  m["command"] = command_;
  m["args"] = args_;
  m["flags"] = flags_;
  m["cwd"] = fs::current_path().string();
  m["inputs"] = inputs_;
  m["outputs"] = outputs;
  m["seed"] = seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr);
  m["started_at"] = started_;
  m["finished_at"] = utc_now();
  {
    std::ofstream mf(staging_ / "manifest.json", std::ios::binary);
    mf << m.dump(2) << '\n';
    if (!mf) throw Error("cannot write manifest");
  }
  fs::create_directories(out_);
  for (const auto& o : outputs_) {
    fs::create_directories((out_ / o).parent_path());
    fs::rename(staging_ / o, out_ / o);
  }
  fs::rename(staging_ / "manifest.json", out_ / "manifest.json");
  committed_ = true;
}

void verify_manifest_inputs(const nlohmann::json& manifest) {
  for (const auto& in : manifest.at("inputs")) {
    const fs::path p = in.at("path").get<std::string>();
    if (!fs::is_regular_file(p)) throw DataError("manifest input is missing: " + p.string());
    if (sha256_file(p) != in.at("sha256").get<std::string>()) throw DataError("manifest input has changed: " + p.string());
  }
}

}  // namespace hurstarb::cli
