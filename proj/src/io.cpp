#include "stefan/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stefan {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

double number_or_inf(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && (v == "inf" || v == "+inf" || v == "Infinity")) return kInf;
  if (v.is_null()) return kInf;
  fail(ErrorCode::type_mismatch, what + " must be a number or \"inf\"");
}

double number(const json& doc, const char* key) {
  require(doc.contains(key), ErrorCode::missing_field, std::string("missing field '") + key + "'");
  require(doc[key].is_number(), ErrorCode::type_mismatch, std::string("field '") + key + "' must be a number");
  return doc[key].get<double>();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_cell(const std::string& s) {
  if (s == "inf") return kInf;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  return v;
}

}  // namespace

PiecewiseProfile profile_from_json(const json& segments, double default_anchor) {
  require(segments.is_array(), ErrorCode::type_mismatch, "segments must be an array");
  std::vector<Segment> out;
  for (const auto& s : segments) {
    require(s.is_object(), ErrorCode::type_mismatch, "segment must be an object");
    for (auto it = s.begin(); it != s.end(); ++it) {
      const auto& k = it.key();
      require(k == "lo" || k == "hi" || k == "kind" || k == "params" || k == "anchor",
              ErrorCode::unknown_key, "unknown segment key '" + k + "'");
    }
    require(s.contains("lo") && s.contains("hi") && s.contains("kind") && s.contains("params"),
            ErrorCode::missing_field, "segment needs lo, hi, kind, params");
    Segment seg;
    seg.lo = number_or_inf(s["lo"], "lo");
    seg.hi = number_or_inf(s["hi"], "hi");
    require(s["kind"].is_string(), ErrorCode::type_mismatch, "segment kind must be a string");
    const std::string kind = s["kind"];
    const json& p = s["params"];
    require(p.is_array(), ErrorCode::type_mismatch, "segment params must be an array");
    for (const auto& v : p) require(v.is_number(), ErrorCode::type_mismatch, "segment params must be numbers");
    if (kind == "constant") {
      require(p.size() == 1, ErrorCode::type_mismatch, "constant segment takes [c]");
      seg.kind = SegmentKind::constant;
      seg.c0 = p[0];
    } else if (kind == "linear") {
      require(p.size() == 2, ErrorCode::type_mismatch, "linear segment takes [a, b]");
      seg.kind = SegmentKind::linear;
      seg.c0 = p[0];
      seg.c1 = p[1];
    } else if (kind == "rational_tail") {
      require(p.size() == 1, ErrorCode::type_mismatch, "rational_tail segment takes [c1]");
      seg.kind = SegmentKind::rational_tail;
      seg.c0 = p[0];
      seg.anchor = s.contains("anchor") ? number(s, "anchor") : default_anchor;
    } else {
      fail(ErrorCode::type_mismatch, "unknown segment kind '" + kind + "'");
    }
    out.push_back(seg);
  }
  return PiecewiseProfile(std::move(out));
}

json profile_to_json(const PiecewiseProfile& profile) {
  json segs = json::array();
  for (const Segment& s : profile.segments()) {
    json j;
    j["lo"] = s.lo;
    j["hi"] = std::isinf(s.hi) ? json("inf") : json(s.hi);
    switch (s.kind) {
      case SegmentKind::constant:
        j["kind"] = "constant";
        j["params"] = {s.c0};
        break;
      case SegmentKind::linear:
        j["kind"] = "linear";
        j["params"] = {s.c0, s.c1};
        break;
      case SegmentKind::rational_tail:
        j["kind"] = "rational_tail";
        j["params"] = {s.c0};
        j["anchor"] = s.anchor;
        break;
    }
    segs.push_back(j);
  }
  return segs;
}

InitialData initial_data_from_json(const json& doc) {
  require(doc.is_object(), ErrorCode::type_mismatch, "initial data must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& k = it.key();
    require(k == "r0" || k == "lambda0minus" || k == "gamma" || k == "C" || k == "segments" ||
                k == "description",
            ErrorCode::unknown_key, "unknown initial-data key '" + k + "'");
  }
  InitialData d;
  d.r0 = number(doc, "r0");
  d.lambda0minus = number(doc, "lambda0minus");
  d.gamma = number(doc, "gamma");
  d.growth_constant = number(doc, "C");
  require(doc.contains("segments"), ErrorCode::missing_field, "missing field 'segments'");
  d.profile = profile_from_json(doc["segments"], d.lambda0minus);
  return d;
}

json initial_data_to_json(const InitialData& d) {
  json j;
  j["r0"] = d.r0;
  j["lambda0minus"] = d.lambda0minus;
  j["gamma"] = d.gamma;
  j["C"] = d.growth_constant;
  j["segments"] = profile_to_json(d.profile);
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), ErrorCode::io, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::config_invalid, "'" + path + "' is not valid JSON: " + e.what());
  }
}

InitialData load_initial_data(const std::string& path) {
  return initial_data_from_json(read_json_file(path));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(bool(out), ErrorCode::io, "cannot write '" + path + "'");
  out << text;
  require(bool(out), ErrorCode::io, "write failed for '" + path + "'");
}

void write_boundary_csv(std::ostream& out, const Boundary& b) {
  out << "t,lambda,lambda_left\n";
  for (std::size_t k = 0; k < b.size(); ++k)
    out << format_double(b.times[k]) << ',' << format_double(b.values[k]) << ','
        << format_double(b.left_limits[k]) << '\n';
}

Boundary read_boundary_csv(std::istream& in) {
  std::string line;
  require(bool(std::getline(in, line)), ErrorCode::io, "empty boundary CSV");
  std::vector<double> t, v, l;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    require(cells.size() >= 2, ErrorCode::io, "boundary CSV row needs t,lambda[,lambda_left]");
    t.push_back(parse_cell(cells[0]));
    v.push_back(parse_cell(cells[1]));
    l.push_back(cells.size() >= 3 ? parse_cell(cells[2]) : v.back());
  }
  require(!t.empty(), ErrorCode::io, "boundary CSV has no rows");
  Boundary b;
  b.times = t;
  b.values = v;
  b.left_limits = l;
  b.lambda0minus = l.front();
  return b;
}

void write_field_csv(std::ostream& out, const TemperatureField& f) {
  out << "x,w,phase\n";
  for (std::size_t i = 0; i < f.radii.size(); ++i) {
    out << format_double(f.radii[i]) << ',' << format_double(f.values[i]) << ','
        << (i < f.phases.size() ? node_phase_name(f.phases[i]) : "") << '\n';
  }
}

TemperatureField read_field_csv(std::istream& in) {
  std::string line;
  require(bool(std::getline(in, line)), ErrorCode::io, "empty field CSV");
  TemperatureField f;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    require(cells.size() >= 2, ErrorCode::io, "field CSV row needs x,w");
    f.radii.push_back(parse_cell(cells[0]));
    f.values.push_back(parse_cell(cells[1]));
  }
  return f;
}

}  // namespace stefan
