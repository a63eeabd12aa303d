#include "basisrisk/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <utility>

namespace basisrisk {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void io_fail(const std::string& what, const fs::path& path) {
  throw std::ios_base::failure(what + ": " + path.string());
}

fs::path temp_sibling(const fs::path& target) {
  static std::random_device rd;
  std::uniform_int_distribution<std::uint64_t> dist;
  std::ostringstream name;
  name << "." << target.filename().string() << "." << std::hex << dist(rd)
       << ".tmp";
  return target.parent_path() / name.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) io_fail("cannot create directory", path.parent_path());
  }
  const fs::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_fail("cannot open for writing", tmp);
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      io_fail("write failed", tmp);
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    io_fail("rename failed", path);
  }
}

bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\n\r") != std::string_view::npos;
}

void append_csv_field(std::string& out, std::string_view field) {
  if (!needs_quoting(field)) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

// SHA-256 (FIPS 180-4), self-contained to avoid a crypto library dependency
// for what is only a content fingerprint.
class Sha256 {
 public:
  void update(const unsigned char* data, std::size_t len) {
    total_ += len;
    while (len > 0) {
      const std::size_t take = std::min(len, std::size_t{64} - fill_);
      std::copy(data, data + take, buffer_.begin() + fill_);
      fill_ += take;
      data += take;
      len -= take;
      if (fill_ == 64) {
        process(buffer_.data());
        fill_ = 0;
      }
    }
  }

  std::string hex_digest() {
    const std::uint64_t bits = total_ * 8;
    unsigned char pad = 0x80;
    update(&pad, 1);
    const unsigned char zero = 0;
    while (fill_ != 56) update(&zero, 1);
    std::array<unsigned char, 8> len_bytes{};
    for (int i = 0; i < 8; ++i)
      len_bytes[static_cast<std::size_t>(i)] =
          static_cast<unsigned char>(bits >> (56 - 8 * i));
    update(len_bytes.data(), 8);
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint32_t word : state_)
      for (int shift = 28; shift >= 0; shift -= 4)
        out.push_back(digits[(word >> shift) & 0xF]);
    return out;
  }

 private:
  static std::uint32_t rotr(std::uint32_t x, int n) {
    return (x >> n) | (x << (32 - n));
  }

  void process(const unsigned char* block) {
    static constexpr std::array<std::uint32_t, 64> k = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b,
        0x59f111f1, 0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01,
        0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7,
        0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc,
        0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152,
        0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
        0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819,
        0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116, 0x1e376c08,
        0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f,
        0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    std::array<std::uint32_t, 64> w{};
    for (int i = 0; i < 16; ++i)
      w[static_cast<std::size_t>(i)] =
          (std::uint32_t{block[4 * i]} << 24) |
          (std::uint32_t{block[4 * i + 1]} << 16) |
          (std::uint32_t{block[4 * i + 2]} << 8) |
          std::uint32_t{block[4 * i + 3]};
    for (std::size_t i = 16; i < 64; ++i) {
      const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^
                               (w[i - 15] >> 3);
      const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^
                               (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    auto [a, b, c, d, e, f, g, h] =
        std::tuple{state_[0], state_[1], state_[2], state_[3],
                   state_[4], state_[5], state_[6], state_[7]};
    for (std::size_t i = 0; i < 64; ++i) {
      const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const std::uint32_t ch = (e & f) ^ (~e & g);
      const std::uint32_t t1 = h + s1 + ch + k[i] + w[i];
      const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      const std::uint32_t t2 = s0 + maj;
      h = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    state_[0] += a;
    state_[1] += b;
    state_[2] += c;
    state_[3] += d;
    state_[4] += e;
    state_[5] += f;
    state_[6] += g;
    state_[7] += h;
  }

  std::array<std::uint32_t, 8> state_ = {0x6a09e667, 0xbb67ae85, 0x3c6ef372,
                                         0xa54ff53a, 0x510e527f, 0x9b05688c,
                                         0x1f83d9ab, 0x5be0cd19};
  std::array<unsigned char, 64> buffer_{};
  std::size_t fill_ = 0;
  std::uint64_t total_ = 0;
};

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

std::filesystem::path write_csv_atomic(const std::filesystem::path& directory,
                                       const Table& table) {
  if (table.name.empty())
    throw std::invalid_argument("table name must be non-empty");
  std::string content;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) content.push_back(',');
    append_csv_field(content, table.columns[i]);
  }
  content.push_back('\n');
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::invalid_argument("row width mismatch in table " + table.name);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) content.push_back(',');
      append_csv_field(content, row[i]);
    }
    content.push_back('\n');
  }
  const fs::path path = directory / (table.name + ".csv");
  write_file_atomic(path, content);
  return path;
}

void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  write_file_atomic(path, content);
}

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  return h.hex_digest();
}

std::string sha256_hex_of_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open for reading", path);
  Sha256 h;
  std::array<char, 1 << 16> chunk{};
  while (in) {
    in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    h.update(reinterpret_cast<const unsigned char*>(chunk.data()),
             static_cast<std::size_t>(in.gcount()));
  }
  return h.hex_digest();
}

std::filesystem::path default_outdir() {
  if (const char* env = std::getenv("BASISRISK_OUTDIR");
      env != nullptr && *env != '\0')
    return fs::path(env);
  return fs::path("out");
}

CsvFile read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open for reading", path);
  std::string raw((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());

  CsvFile file;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (!saw_any) {
      file.columns = std::move(row);
      saw_any = true;
    } else {
      file.rows.push_back(std::move(row));
    }
    row.clear();
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < raw.size() && raw[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      in_quotes = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() || !row.empty() || !saw_any) end_row();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!field.empty() || !row.empty()) end_row();
  if (in_quotes) io_fail("unterminated quoted field", path);
  for (const auto& r : file.rows)
    if (r.size() != file.columns.size())
      io_fail("ragged row", path);
  return file;
}

ManifestBuilder::ManifestBuilder(std::string command, std::uint64_t seed)
    : command_(std::move(command)), seed_(seed),
      config_(nlohmann::json::object()) {}

void ManifestBuilder::set_config(nlohmann::json config) {
  config_ = std::move(config);
}

void ManifestBuilder::add_output(const std::filesystem::path& path,
                                 std::int64_t rows) {
  outputs_.emplace_back(path.filename().string(), sha256_hex_of_file(path),
                        rows);
}

void ManifestBuilder::set_duration_ms(double ms) { duration_ms_ = ms; }

std::filesystem::path ManifestBuilder::write(
    const std::filesystem::path& directory) const {
  nlohmann::json doc;
  doc["command"] = command_;
  doc["seed"] = seed_;
  doc["config"] = config_;
  doc["duration_ms"] = duration_ms_;
  auto outputs = nlohmann::json::array();
  for (const auto& [file, sha, rows] : outputs_) {
    outputs.push_back(
        {{"file", file}, {"sha256", sha}, {"rows", rows}});
  }
  doc["outputs"] = std::move(outputs);
  const fs::path path = directory / "manifest.json";
  write_file_atomic(path, doc.dump(2) + "\n");
  return path;
}

}  // namespace basisrisk
