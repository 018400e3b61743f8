#include "hubtrack/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

#include "hubtrack/errors.hpp"

namespace hubtrack {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

double parse_double(std::string_view token, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    std::ostringstream msg;
    msg << path.string() << ":" << line << ": cannot parse '" << token << "' as a number";
    throw IoError(msg.str());
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ',')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != ',') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct ColumnRef {
  const char* name;
  std::vector<double> Trajectory::*series;
};

constexpr std::array<ColumnRef, 13> kColumns{{
    {"t", &Trajectory::time},
    {"phi", &Trajectory::phi},
    {"J", &Trajectory::current},
    {"J_target", &Trajectory::target},
    {"R", &Trajectory::R},
    {"theta", &Trajectory::theta},
    {"C", &Trajectory::C},
    {"kappa", &Trajectory::kappa},
    {"norm", &Trajectory::norm},
    {"energy", &Trajectory::energy},
    {"X", &Trajectory::X},
    {"doublons", &Trajectory::doublons},
    {"O", &Trajectory::observable},
}};

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw IoError("number formatting failed");
  return {buf.data(), ptr};
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return columns[i];
  }
  throw IoError("table has no column '" + name + "'");
}

bool Table::has(const std::string& name) const {
  for (const auto& n : names) {
    if (n == name) return true;
  }
  return false;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  if (table.names.size() != table.columns.size()) throw IoError("column names do not match data");
  const std::size_t rows = table.rows();
  for (const auto& c : table.columns) {
    if (c.size() != rows) throw IoError("columns of unequal length");
  }
  auto out = open_out(path);
  for (const auto& c : table.comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.names.size(); ++i) out << (i ? " " : "") << table.names[i];
  out << '\n';
  std::string line;
  for (std::size_t r = 0; r < rows; ++r) {
    line.clear();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) line += ' ';
      line += format_double(table.columns[c][r]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!have_header) t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    const auto tokens = split(line);
    if (tokens.empty()) continue;
    if (!have_header) {
      for (auto tok : tokens) t.names.emplace_back(tok);
      t.columns.resize(t.names.size());
      have_header = true;
      continue;
    }
    if (tokens.size() != t.names.size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": expected " << t.names.size() << " columns, got "
          << tokens.size();
      throw IoError(msg.str());
    }
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      t.columns[c].push_back(parse_double(tokens[c], path, lineno));
    }
  }
  if (!have_header) throw IoError(path.string() + ": no column header");
  return t;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                      const std::string& kind) {
  Table t;
  t.comments = {"hubtrack trajectory: " + kind,
                "units: t in 1/t0, phi in rad, J in e a t0 (e = 1), energy in t0",
                "theta and kappa are unwrapped; O_target replaces J_target for observable tracking"};
  for (const auto& col : kColumns) {
    const auto& series = traj.*col.series;
    if (series.empty()) continue;
    const bool observable_target = col.series == &Trajectory::target && !traj.observable.empty();
    t.names.emplace_back(observable_target ? "O_target" : col.name);
    t.columns.push_back(series);
  }
  write_table(path, t);
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  const Table t = read_table(path);
  Trajectory traj;
  for (const auto& col : kColumns) {
    if (t.has(col.name)) traj.*col.series = t.column(col.name);
  }
  if (t.has("O_target")) traj.target = t.column("O_target");
  if (traj.time.empty() && !t.has("t")) throw IoError(path.string() + ": missing t column");
  return traj;
}

void write_spectrum(const std::filesystem::path& path, const Spectrum& spectrum,
                    const std::string& source) {
  Table t;
  t.comments = {"hubtrack spectrum of " + source,
                "order: omega / omega0 with omega0 = " + format_double(spectrum.omega0),
                "power: one-sided |DFT(w * dJ/dt)|^2 with window " + to_string(spectrum.window) +
                    ", normalised so that sum(power) = sum |w x|^2"};
  t.names = {"order", "power"};
  t.columns = {spectrum.order, spectrum.power};
  write_table(path, t);
}

void write_state(const std::filesystem::path& path, const StateVector& psi) {
  Table t;
  t.comments = {"state amplitudes over the sector basis (index = i_up * |down| + i_down)"};
  t.names = {"index", "re", "im"};
  t.columns.resize(3);
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    t.columns[0].push_back(static_cast<double>(i));
    t.columns[1].push_back(psi[i].real());
    t.columns[2].push_back(psi[i].imag());
  }
  write_table(path, t);
}

void write_snapshots(const std::filesystem::path& path,
                     const std::vector<std::pair<double, StateVector>>& snapshots) {
  Table t;
  t.comments = {"state snapshots; index = i_up * |down| + i_down"};
  t.names = {"t", "index", "re", "im"};
  t.columns.resize(4);
  for (const auto& [time, psi] : snapshots) {
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      t.columns[0].push_back(time);
      t.columns[1].push_back(static_cast<double>(i));
      t.columns[2].push_back(psi[i].real());
      t.columns[3].push_back(psi[i].imag());
    }
  }
  write_table(path, t);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace hubtrack
