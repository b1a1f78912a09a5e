#include "qtomo/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace qtomo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const char* what) {
  throw std::runtime_error(path + ": " + what);
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) fail(path, "cannot open for writing");
  return out;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) fail(path, "cannot open");
  return in;
}

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail(path, "truncated file");
  return v;
}

// shortest round-trip decimal
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) fail(path, "malformed number");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// "key=value" scan over a comment header
std::string header_field(const std::string& line, const std::string& key,
                         const std::string& path) {
  const std::string needle = key + "=";
  const size_t pos = line.find(needle);
  if (pos == std::string::npos) fail(path, "missing header field");
  const size_t start = pos + needle.size();
  size_t end = line.find(' ', start);
  if (end == std::string::npos) end = line.size();
  return line.substr(start, end - start);
}

void write_grid_header(std::ostream& out, const GridSpec& g, uint64_t total,
                       uint64_t overflow) {
  put<uint32_t>(out, static_cast<uint32_t>(g.nx));
  put<uint32_t>(out, static_cast<uint32_t>(g.ny));
  put<double>(out, g.x_min);
  put<double>(out, g.x_max);
  put<double>(out, g.y_min);
  put<double>(out, g.y_max);
  put<uint64_t>(out, total);
  put<uint64_t>(out, overflow);
}

GridSpec read_grid_header(std::istream& in, const std::string& path,
                          uint64_t& total, uint64_t& overflow) {
  GridSpec g;
  g.nx = static_cast<int>(get<uint32_t>(in, path));
  g.ny = static_cast<int>(get<uint32_t>(in, path));
  g.x_min = get<double>(in, path);
  g.x_max = get<double>(in, path);
  g.y_min = get<double>(in, path);
  g.y_max = get<double>(in, path);
  total = get<uint64_t>(in, path);
  overflow = get<uint64_t>(in, path);
  g.validate();
  return g;
}

json matrix_json(const Matrix& rho) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < rho.rows(); ++i) {
    json row_re = json::array(), row_im = json::array();
    for (int j = 0; j < rho.cols(); ++j) {
      row_re.push_back(rho(i, j).real());
      row_im.push_back(rho(i, j).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return json{{"dim", rho.rows()}, {"re", std::move(re)},
              {"im", std::move(im)}};
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.contains("dim") || !j.contains("re") || !j.contains("im"))
    fail(path, "missing dim/re/im");
  const int d = j["dim"].get<int>();
  if (d < 1) fail(path, "bad dimension");
  const auto& re = j["re"];
  const auto& im = j["im"];
  if (static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d)
    fail(path, "row count mismatch");
  Matrix rho(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(re[i].size()) != d ||
        static_cast<int>(im[i].size()) != d)
      fail(path, "column count mismatch");
    for (int k = 0; k < d; ++k)
      rho(i, k) = Complex(re[i][k].get<double>(), im[i][k].get<double>());
  }
  return rho;
}

}  // namespace

void write_histogram(const Histogram2D& hist, const std::string& path) {
  auto out = open_out(path, true);
  out.write("QTH1", 4);
  write_grid_header(out, hist.spec, hist.total, hist.overflow);
  out.write(reinterpret_cast<const char*>(hist.counts.data()),
            static_cast<std::streamsize>(hist.counts.size() * sizeof(double)));
  if (!out) fail(path, "write failed");
}

Histogram2D read_histogram(const std::string& path) {
  auto in = open_in(path, true);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "QTH1", 4) != 0) fail(path, "not a QTH1 file");
  Histogram2D h;
  h.spec = read_grid_header(in, path, h.total, h.overflow);
  h.counts.resize(static_cast<size_t>(h.spec.size()));
  in.read(reinterpret_cast<char*>(h.counts.data()),
          static_cast<std::streamsize>(h.counts.size() * sizeof(double)));
  if (!in) fail(path, "truncated file");
  return h;
}

void write_joint_histogram(const Joint3DHistogram& hist,
                           const std::string& path) {
  auto out = open_out(path, true);
  out.write("QTJ1", 4);
  const char basis = hist.basis == PauliBasis::x   ? 'x'
                     : hist.basis == PauliBasis::y ? 'y'
                                                   : 'z';
  put<uint8_t>(out, static_cast<uint8_t>(basis));
  put<uint32_t>(out, static_cast<uint32_t>(hist.spec.nx));
  put<uint32_t>(out, static_cast<uint32_t>(hist.spec.ny));
  put<uint32_t>(out, static_cast<uint32_t>(hist.nq()));
  put<double>(out, hist.spec.x_min);
  put<double>(out, hist.spec.x_max);
  put<double>(out, hist.spec.y_min);
  put<double>(out, hist.spec.y_max);
  put<uint64_t>(out, hist.total);
  put<uint64_t>(out, hist.overflow);
  out.write(reinterpret_cast<const char*>(hist.q_edges.data()),
            static_cast<std::streamsize>(hist.q_edges.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(hist.counts.data()),
            static_cast<std::streamsize>(hist.counts.size() * sizeof(double)));
  if (!out) fail(path, "write failed");
}

Joint3DHistogram read_joint_histogram(const std::string& path) {
  auto in = open_in(path, true);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "QTJ1", 4) != 0) fail(path, "not a QTJ1 file");
  Joint3DHistogram h;
  const char basis = static_cast<char>(get<uint8_t>(in, path));
  if (basis == 'x')
    h.basis = PauliBasis::x;
  else if (basis == 'y')
    h.basis = PauliBasis::y;
  else if (basis == 'z')
    h.basis = PauliBasis::z;
  else
    fail(path, "unknown basis");
  h.spec.nx = static_cast<int>(get<uint32_t>(in, path));
  h.spec.ny = static_cast<int>(get<uint32_t>(in, path));
  const int nq = static_cast<int>(get<uint32_t>(in, path));
  if (nq < 1) fail(path, "bad readout bin count");
  h.spec.x_min = get<double>(in, path);
  h.spec.x_max = get<double>(in, path);
  h.spec.y_min = get<double>(in, path);
  h.spec.y_max = get<double>(in, path);
  h.spec.validate();
  h.total = get<uint64_t>(in, path);
  h.overflow = get<uint64_t>(in, path);
  h.q_edges.resize(nq + 1);
  in.read(reinterpret_cast<char*>(h.q_edges.data()),
          static_cast<std::streamsize>(h.q_edges.size() * sizeof(double)));
  h.counts.resize(static_cast<size_t>(h.spec.size()) * nq);
  in.read(reinterpret_cast<char*>(h.counts.data()),
          static_cast<std::streamsize>(h.counts.size() * sizeof(double)));
  if (!in) fail(path, "truncated file");
  return h;
}

void write_record(const MeasurementRecord& record, const std::string& path) {
  auto out = open_out(path, false);
  out << "# N0=" << fmt(record.noise.n0) << " offset="
      << fmt(record.noise.offset.real()) << ',' << fmt(record.noise.offset.imag())
      << " seed=" << record.seed << "\n";
  for (const Complex& s : record.samples)
    out << fmt(s.real()) << ',' << fmt(s.imag()) << "\n";
  if (!out) fail(path, "write failed");
}

MeasurementRecord read_record(const std::string& path) {
  auto in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    fail(path, "missing record header");
  MeasurementRecord rec;
  const double n0 = to_double(header_field(line, "N0", path), path);
  const auto off = split(header_field(line, "offset", path), ',');
  if (off.size() != 2) fail(path, "malformed offset");
  const Complex offset(to_double(off[0], path), to_double(off[1], path));
  rec.noise = (n0 == 0.0 && offset == Complex(0, 0))
                  ? NoiseModel::vacuum_noise()
                  : NoiseModel::thermal_noise(n0, offset);
  rec.seed = std::stoull(header_field(line, "seed", path));
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, ',');
    if (f.size() != 2) fail(path, "expected re,im");
    rec.samples.emplace_back(to_double(f[0], path), to_double(f[1], path));
  }
  return rec;
}

void write_two_channel_record(const TwoChannelRecord& record,
                              const std::string& path) {
  auto out = open_out(path, false);
  out << "# N1=" << fmt(record.noise.n1) << " N2=" << fmt(record.noise.n2)
      << " seed=" << record.seed << "\n";
  for (size_t i = 0; i < record.count(); ++i)
    out << fmt(record.s1[i].real()) << ',' << fmt(record.s1[i].imag()) << ','
        << fmt(record.s2[i].real()) << ',' << fmt(record.s2[i].imag()) << "\n";
  if (!out) fail(path, "write failed");
}

TwoChannelRecord read_two_channel_record(const std::string& path) {
  auto in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    fail(path, "missing record header");
  TwoChannelRecord rec;
  rec.noise.n1 = to_double(header_field(line, "N1", path), path);
  rec.noise.n2 = to_double(header_field(line, "N2", path), path);
  rec.seed = std::stoull(header_field(line, "seed", path));
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, ',');
    if (f.size() != 4) fail(path, "expected re1,im1,re2,im2");
    rec.s1.emplace_back(to_double(f[0], path), to_double(f[1], path));
    rec.s2.emplace_back(to_double(f[2], path), to_double(f[3], path));
  }
  return rec;
}

namespace {

const char* ordering_name(Ordering tag) {
  switch (tag) {
    case Ordering::anti_normal_s: return "anti_normal_s";
    case Ordering::normal_a: return "normal_a";
    case Ordering::anti_normal_h: return "anti_normal_h";
  }
  return "?";
}

Ordering ordering_from_name(const std::string& name, const std::string& path) {
  if (name == "anti_normal_s") return Ordering::anti_normal_s;
  if (name == "normal_a") return Ordering::normal_a;
  if (name == "anti_normal_h") return Ordering::anti_normal_h;
  fail(path, "unknown ordering tag");
}

}  // namespace

void write_moment_table(const MomentTable& table, const std::string& path) {
  auto out = open_out(path, false);
  out << "# ordering=" << ordering_name(table.tag())
      << " max_order=" << table.max_order() << "\n";
  out << "n,m,re,im,stderr\n";
  for (int n = 0; n <= table.max_order(); ++n)
    for (int m = 0; n + m <= table.max_order(); ++m)
      out << n << ',' << m << ',' << fmt(table.value(n, m).real()) << ','
          << fmt(table.value(n, m).imag()) << ',' << fmt(table.sigma(n, m))
          << "\n";
  if (!out) fail(path, "write failed");
}

MomentTable read_moment_table(const std::string& path) {
  auto in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    fail(path, "missing table header");
  const Ordering tag = ordering_from_name(header_field(line, "ordering", path), path);
  const int max_order = std::stoi(header_field(line, "max_order", path));
  MomentTable table(max_order, tag);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
    const auto f = split(line, ',');
    if (f.size() != 5) fail(path, "expected n,m,re,im,stderr");
    table.set(std::stoi(f[0]), std::stoi(f[1]),
              Complex(to_double(f[2], path), to_double(f[3], path)),
              to_double(f[4], path));
  }
  return table;
}

void write_phase_grid(const PhaseGrid& grid, const std::string& path) {
  auto out = open_out(path, false);
  const GridSpec& g = grid.spec;
  out << "# " << fmt(g.x_min) << ',' << fmt(g.x_max) << ',' << fmt(g.y_min)
      << ',' << fmt(g.y_max) << ',' << g.nx << ',' << g.ny << "\n";
  out << "x,y,value\n";
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const Complex c = g.center(ix, iy);
      out << fmt(c.real()) << ',' << fmt(c.imag()) << ','
          << fmt(grid.values[g.index(ix, iy)]) << "\n";
    }
  if (!out) fail(path, "write failed");
}

PhaseGrid read_phase_grid(const std::string& path) {
  auto in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
    fail(path, "missing grid header");
  const auto h = split(line.substr(2), ',');
  if (h.size() != 6) fail(path, "expected 6 header fields");
  GridSpec g;
  g.x_min = to_double(h[0], path);
  g.x_max = to_double(h[1], path);
  g.y_min = to_double(h[2], path);
  g.y_max = to_double(h[3], path);
  g.nx = std::stoi(h[4]);
  g.ny = std::stoi(h[5]);
  g.validate();
  PhaseGrid grid = PhaseGrid::zeros(g);
  size_t i = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    const auto f = split(line, ',');
    if (f.size() != 3) fail(path, "expected x,y,value");
    if (i >= grid.values.size()) fail(path, "too many rows");
    grid.values[i++] = to_double(f[2], path);
  }
  if (i != grid.values.size()) fail(path, "row count mismatch");
  return grid;
}

void write_density_matrix(const Matrix& rho, const std::string& path) {
  auto out = open_out(path, false);
  out << matrix_json(rho).dump(2) << "\n";
  if (!out) fail(path, "write failed");
}

Matrix read_density_matrix(const std::string& path) {
  auto in = open_in(path, false);
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    fail(path, "malformed JSON");
  }
  return matrix_from_json(j, path);
}

std::string density_matrix_json(const Matrix& rho) {
  return matrix_json(rho).dump(2);
}

Matrix density_matrix_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    fail("<string>", "malformed JSON");
  }
  return matrix_from_json(j, "<string>");
}

void write_time_series(const TimeSeries& ts, const std::string& path) {
  auto out = open_out(path, false);
  out << "# dt=" << fmt(ts.dt) << "\n";
  out << "t,re,im\n";
  for (size_t k = 0; k < ts.size(); ++k)
    out << fmt(k * ts.dt) << ',' << fmt(ts.samples[k].real()) << ','
        << fmt(ts.samples[k].imag()) << "\n";
  if (!out) fail(path, "write failed");
}

TimeSeries read_time_series(const std::string& path) {
  auto in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    fail(path, "missing series header");
  TimeSeries ts;
  ts.dt = to_double(header_field(line, "dt", path), path);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    const auto f = split(line, ',');
    if (f.size() != 3) fail(path, "expected t,re,im");
    ts.samples.emplace_back(to_double(f[1], path), to_double(f[2], path));
  }
  return ts;
}

void write_report(const ReconstructionReport& report,
                  const std::string& path) {
  json j;
  j["rho"] = matrix_json(report.rho);
  if (report.fidelity_vs_target)
    j["fidelity_vs_target"] = *report.fidelity_vs_target;
  else
    j["fidelity_vs_target"] = nullptr;
  j["log_likelihood"] = report.log_likelihood;
  j["iterations"] = report.iterations;
  j["engine"] = report.engine;
  auto out = open_out(path, false);
  out << j.dump(2) << "\n";
  if (!out) fail(path, "write failed");
}

ReconstructionReport read_report(const std::string& path) {
  auto in = open_in(path, false);
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    fail(path, "malformed JSON");
  }
  ReconstructionReport rep;
  rep.rho = matrix_from_json(j.at("rho"), path);
  if (!j.at("fidelity_vs_target").is_null())
    rep.fidelity_vs_target = j["fidelity_vs_target"].get<double>();
  rep.log_likelihood = j.at("log_likelihood").get<double>();
  rep.iterations = j.at("iterations").get<int>();
  rep.engine = j.at("engine").get<std::string>();
  return rep;
}

}  // namespace qtomo
