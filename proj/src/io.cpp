#include "wavetraj/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "wavetraj/errors.hpp"

namespace wavetraj {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_field(std::string_view field, long line) {
  T value{};
  const auto f = trim(field);
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
    throw Error(ErrorKind::MalformedCsv,
                "line " + std::to_string(line) + ": cannot parse '" + std::string(f) + "'");
  }
  return value;
}

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_csv_number(v);
    first = false;
  }
}

}  // namespace

Overrides parse_config_text(std::string_view text, std::string_view origin) {
  Overrides out;
  long line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = std::string(origin) + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::ConfigParse, where + ": expected 'key = value', got '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::ConfigParse, where + ": empty key");
    if (value.empty()) throw Error(ErrorKind::ConfigParse, where + ": empty value for '" + std::string(key) + "'");
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

Overrides read_config_file(const std::filesystem::path& path) {
  return parse_config_text(read_text_file(path), path.string());
}

std::string format_config(const std::map<std::string, std::string>& settings) {
  std::string out;
  for (const auto& [key, value] : settings) out += key + " = " + value + "\n";
  return out;
}

std::string format_csv_number(double v) {
  char buf[48];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 8);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string trajectories_csv(const TrajectoryLog& log) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& sample : log.samples) {
    const auto& f = sample.front;
    const bool has_w = f.wave.potential.size() == f.size();
    const bool has_drift = sample.h_drift.size() == f.size();
    for (int i = 0; i < f.size(); ++i) {
      out += format_csv_number(sample.t);
      out += ',' + std::to_string(f.id[i]) + ',';
      append_row(out, {f.position(kX, i), f.position(kZ, i), f.momentum(kX, i), f.momentum(kZ, i),
                       f.amplitude(i), has_w ? f.wave.potential(i) : 0.0,
                       has_drift ? sample.h_drift(i) : 0.0});
      out += ',' + std::to_string(f.flags[i]) + '\n';
    }
  }
  return out;
}

std::string metrics_csv(const std::vector<BeamMetrics>& metrics) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const auto& m : metrics) {
    append_row(out, {m.t, m.z_axis, m.envelope_plus, m.envelope_minus, m.rms_width, m.peak_intensity,
                     m.axial_pz});
    out += '\n';
  }
  return out;
}

std::vector<TrajectoryRow> parse_trajectories_csv(std::string_view text) {
  auto lines = split(text, '\n');
  if (lines.empty() || trim(lines.front()) != kTrajectoryHeader) {
    throw Error(ErrorKind::MalformedCsv, "missing or unexpected trajectories.csv header");
  }
  std::vector<TrajectoryRow> rows;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto line = trim(lines[n]);
    if (line.empty()) continue;
    const long line_no = static_cast<long>(n) + 1;
    const auto f = split(line, ',');
    if (f.size() != 10) {
      throw Error(ErrorKind::MalformedCsv, "line " + std::to_string(line_no) + ": expected 10 fields, got " +
                                               std::to_string(f.size()));
    }
    TrajectoryRow r;
    r.t = parse_field<double>(f[0], line_no);
    r.ray_id = parse_field<int>(f[1], line_no);
    r.x = parse_field<double>(f[2], line_no);
    r.z = parse_field<double>(f[3], line_no);
    r.px = parse_field<double>(f[4], line_no);
    r.pz = parse_field<double>(f[5], line_no);
    r.R = parse_field<double>(f[6], line_no);
    r.W = parse_field<double>(f[7], line_no);
    r.h_drift = parse_field<double>(f[8], line_no);
    r.flags = parse_field<unsigned>(f[9], line_no);
    rows.push_back(r);
  }
  return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoFailure, "cannot read '" + path.string() + "'");
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create '" + path.parent_path().string() + "': " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::IoFailure, "short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::IoFailure, "cannot rename into '" + path.string() + "': " + ec.message());
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::IoFailure, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

// --- SVG -------------------------------------------------------------------

namespace {

constexpr double kPanelW = 640.0;
constexpr double kPanelH = 420.0;
constexpr double kMargin = 50.0;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Degenerate ranges get a unit span so a zero-step run still has axes.
  void pad() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, ptr);
}

std::string tick_label(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, ptr);
}

struct Frame {
  double x0, y0;  // panel origin in the document
  Range h, v;

  double px(double value) const { return h.map(value, x0 + kMargin, x0 + kPanelW - 10.0); }
  double py(double value) const { return v.map(value, y0 + kPanelH - kMargin, y0 + 20.0); }
};

void axes(std::string& out, const Frame& f, const std::string& title, const std::string& hlabel,
          const std::string& vlabel) {
  const double left = f.x0 + kMargin, right = f.x0 + kPanelW - 10.0;
  const double top = f.y0 + 20.0, bottom = f.y0 + kPanelH - kMargin;
  out += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(right - left) +
         "\" height=\"" + fmt(bottom - top) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  out += "<text x=\"" + fmt((left + right) / 2) + "\" y=\"" + fmt(f.y0 + 14.0) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + title + "</text>\n";
  out += "<text x=\"" + fmt((left + right) / 2) + "\" y=\"" + fmt(bottom + 36.0) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + hlabel + "</text>\n";
  out += "<text x=\"" + fmt(f.x0 + 12.0) + "\" y=\"" + fmt((top + bottom) / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 " + fmt(f.x0 + 12.0) + " " +
         fmt((top + bottom) / 2) + ")\">" + vlabel + "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double hv = f.h.lo + (f.h.hi - f.h.lo) * k / 4.0;
    const double vv = f.v.lo + (f.v.hi - f.v.lo) * k / 4.0;
    out += "<text x=\"" + fmt(f.px(hv)) + "\" y=\"" + fmt(bottom + 16.0) +
           "\" text-anchor=\"middle\" font-size=\"10\">" + tick_label(hv) + "</text>\n";
    out += "<text x=\"" + fmt(left - 4.0) + "\" y=\"" + fmt(f.py(vv) + 3.0) +
           "\" text-anchor=\"end\" font-size=\"10\">" + tick_label(vv) + "</text>\n";
  }
}

void polyline(std::string& out, const std::vector<std::pair<double, double>>& pts, const char* style) {
  out += "<polyline fill=\"none\" " + std::string(style) + " points=\"";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k) out += ' ';
    out += fmt(pts[k].first) + "," + fmt(pts[k].second);
  }
  out += "\"/>\n";
}

struct Grouped {
  std::map<int, std::vector<const TrajectoryRow*>> by_ray;  // in file order
  std::vector<const TrajectoryRow*> first_front, last_front;
  std::pair<int, int> heavy{-1, -1};
};

Grouped group_rows(const std::vector<TrajectoryRow>& rows) {
  if (rows.empty()) throw Error(ErrorKind::MalformedCsv, "no trajectory rows to plot");
  Grouped g;
  const double t_first = rows.front().t;
  const double t_last = rows.back().t;
  for (const auto& r : rows) {
    g.by_ray[r.ray_id].push_back(&r);
    if (r.t == t_first) g.first_front.push_back(&r);
    if (r.t == t_last) g.last_front.push_back(&r);
  }
  // Heavy rays: launched closest to x = -1 and x = +1.
  double best_minus = std::numeric_limits<double>::infinity(), best_plus = best_minus;
  for (const auto* r : g.first_front) {
    if (std::abs(r->x + 1.0) < best_minus) {
      best_minus = std::abs(r->x + 1.0);
      g.heavy.first = r->ray_id;
    }
    if (std::abs(r->x - 1.0) < best_plus) {
      best_plus = std::abs(r->x - 1.0);
      g.heavy.second = r->ray_id;
    }
  }
  return g;
}

void trajectory_panel(std::string& out, const Grouped& g, double x0) {
  Frame f{x0, 0.0, {}, {}};
  for (const auto& [id, pts] : g.by_ray) {
    for (const auto* r : pts) {
      f.h.add(r->z);
      f.v.add(r->x);
    }
  }
  f.h.pad();
  f.v.pad();
  axes(out, f, "trajectories", "z / w0", "x / w0");
  for (const auto& [id, pts] : g.by_ray) {
    if (id == g.heavy.first || id == g.heavy.second) continue;
    std::vector<std::pair<double, double>> line;
    for (const auto* r : pts) line.emplace_back(f.px(r->z), f.py(r->x));
    polyline(out, line, "stroke=\"#6a8caf\" stroke-width=\"0.5\"");
  }
  for (const auto* front : {&g.first_front, &g.last_front}) {
    std::vector<std::pair<double, double>> line;
    for (const auto* r : *front) line.emplace_back(f.px(r->z), f.py(r->x));
    polyline(out, line, "stroke=\"#999\" stroke-width=\"0.8\" stroke-dasharray=\"3,2\"");
  }
  for (int id : {g.heavy.first, g.heavy.second}) {
    const auto it = g.by_ray.find(id);
    if (it == g.by_ray.end()) continue;
    std::vector<std::pair<double, double>> line;
    for (const auto* r : it->second) line.emplace_back(f.px(r->z), f.py(r->x));
    out += "<!-- envelope ray " + std::to_string(id) + " -->\n";
    polyline(out, line, "class=\"envelope\" stroke=\"#000\" stroke-width=\"2.5\"");
  }
}

void intensity_panel(std::string& out, const Grouped& g, double x0) {
  Frame f{x0, 0.0, {}, {}};
  f.v.add(0.0);
  for (const auto* front : {&g.first_front, &g.last_front}) {
    for (const auto* r : *front) {
      f.h.add(r->x);
      f.v.add(r->R * r->R);
    }
  }
  f.h.pad();
  f.v.pad();
  axes(out, f, "intensity R^2", "x / w0", "R^2");
  const bool single = g.first_front.front()->t == g.last_front.front()->t;
  const std::pair<const std::vector<const TrajectoryRow*>*, const char*> curves[] = {
      {&g.first_front, "class=\"initial\" stroke=\"#1f5fa0\" stroke-width=\"1.5\""},
      {&g.last_front, "class=\"final\" stroke=\"#c0392b\" stroke-width=\"1.5\""},
  };
  for (int k = 0; k < (single ? 1 : 2); ++k) {
    std::vector<std::pair<double, double>> line;
    for (const auto* r : *curves[k].first) line.emplace_back(f.px(r->x), f.py(r->R * r->R));
    polyline(out, line, curves[k].second);
  }
}

std::string document(double width, const std::string& body) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fmt(width) + "\" height=\"" + fmt(kPanelH) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(kPanelH) +
         "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body +
         "</svg>\n";
}

}  // namespace

std::string trajectories_svg(const std::vector<TrajectoryRow>& rows) {
  const auto g = group_rows(rows);
  std::string body;
  trajectory_panel(body, g, 0.0);
  return document(kPanelW, body);
}

std::string intensity_svg(const std::vector<TrajectoryRow>& rows) {
  const auto g = group_rows(rows);
  std::string body;
  intensity_panel(body, g, 0.0);
  return document(kPanelW, body);
}

std::string combined_svg(const std::vector<TrajectoryRow>& rows) {
  const auto g = group_rows(rows);
  std::string body;
  trajectory_panel(body, g, 0.0);
  intensity_panel(body, g, kPanelW);
  return document(2 * kPanelW, body);
}

}  // namespace wavetraj
