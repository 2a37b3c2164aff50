#include "canonrep/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "canonrep/error.hpp"

namespace canonrep {

namespace {

const Json& need(const Json& j, const char* key) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::Parse, std::string("missing field '") + key + "'");
  return *it;
}

std::size_t need_size(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorKind::Parse, std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

void check_version(const Json& j) {
  if (auto it = j.find("format_version"); it != j.end()) {
    if (!it->is_number_integer() || it->get<int>() != kFormatVersion) {
      throw Error(ErrorKind::Parse, "unsupported format_version " + it->dump());
    }
  }
}

const Json& branches_of(const Json& node) {
  const Json& b = need(node, "branches");
  if (!b.is_array()) throw Error(ErrorKind::Parse, "'branches' must be an array");
  return b;
}

Json interval_to_json(const Interval& c) { return Json::array({to_string(c.lo), to_string(c.hi)}); }

Interval interval_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::Parse, "an interval is a pair [lo, hi]");
  return {rational_from_json(j[0]), rational_from_json(j[1])};
}

}  // namespace

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.dump());
  if (j.is_number_float()) return parse_rational(j.dump());
  throw Error(ErrorKind::Parse, "expected a number or a \"p/q\" string, got " + j.dump());
}

Json value_to_json(const Value& v) {
  Json out = Json::array();
  for (const Rational& c : v.coords) out.push_back(to_string(c));
  return out;
}

Value value_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "a value is an array of coordinates");
  Value v;
  for (const Json& c : j) v.coords.push_back(rational_from_json(c));
  return v;
}

Json path_to_json(const ValuePath& p) {
  Json out = Json::array();
  for (const Value& v : p) out.push_back(value_to_json(v));
  return out;
}

Json process_to_json(const FiniteProcess& p) {
  std::function<Json(NodeId)> rec = [&](NodeId id) {
    Json branches = Json::array();
    for (const Branch& b : p.node(id).branches) {
      Json br;
      br["value"] = value_to_json(b.value);
      br["prob"] = to_string(b.prob);
      br["child"] = b.child == kLeaf ? Json(nullptr) : rec(b.child);
      branches.push_back(std::move(br));
    }
    return Json{{"branches", std::move(branches)}};
  };
  Json out;
  out["format_version"] = kFormatVersion;
  out["dimension"] = p.dimension();
  out["depth"] = p.depth();
  out["root"] = rec(p.root());
  return out;
}

FiniteProcess process_from_json(const Json& j) {
  check_version(j);
  const std::size_t dim = need_size(j, "dimension");
  const std::size_t depth = need_size(j, "depth");
  ProcessBuilder builder(dim);
  std::function<NodeId(const Json&)> rec = [&](const Json& node) -> NodeId {
    std::vector<Branch> branches;
    for (const Json& b : branches_of(node)) {
      Branch br;
      br.value = value_from_json(need(b, "value"));
      br.prob = rational_from_json(need(b, "prob"));
      const Json& child = need(b, "child");
      br.child = child.is_null() ? kLeaf : rec(child);
      branches.push_back(std::move(br));
    }
    return builder.add(std::move(branches));
  };
  const NodeId root = rec(need(j, "root"));
  return std::move(builder).build(root, depth);
}

Json representation_to_json(const CellRepresentation& r) {
  std::function<Json(NodeId)> rec = [&](NodeId id) {
    const Partition& part = r.node(id);
    Json branches = Json::array();
    for (std::size_t i = 0; i < part.size(); ++i) {
      Json br;
      br["value"] = value_to_json(part.values[i]);
      br["interval"] = interval_to_json(part.interval(i));
      br["prob"] = to_string(part.interval(i).length());
      br["child"] = part.children[i] == kLeaf ? Json(nullptr) : rec(part.children[i]);
      branches.push_back(std::move(br));
    }
    return Json{{"branches", std::move(branches)}};
  };
  Json out;
  out["format_version"] = kFormatVersion;
  out["dimension"] = r.dimension();
  out["depth"] = r.depth();
  out["root"] = rec(r.root());
  return out;
}

CellRepresentation representation_from_json(const Json& j) {
  check_version(j);
  const std::size_t dim = need_size(j, "dimension");
  const std::size_t depth = need_size(j, "depth");
  if (depth == 0) throw Error(ErrorKind::RaggedDepth, "representation depth must be at least 1", "[]");
  std::vector<Partition> nodes;
  ValuePath prefix;
  std::function<NodeId(const Json&)> rec = [&](const Json& node) -> NodeId {
    Partition part;
    const Json& branches = branches_of(node);
    if (branches.empty()) throw Error(ErrorKind::RaggedDepth, "node without branches", to_string(prefix));
    for (const Json& b : branches) {
      Value v = value_from_json(need(b, "value"));
      const Interval cell = interval_from_json(need(b, "interval"));
      if (part.cuts.empty()) part.cuts.push_back(cell.lo);
      if (cell.lo != part.cuts.back()) throw Error(ErrorKind::ProbSumNotOne, "cells do not tile [0,1)", to_string(prefix));
      part.cuts.push_back(cell.hi);
      const Json& child = need(b, "child");
      if (child.is_null() != (prefix.size() + 1 == depth)) {
        throw Error(ErrorKind::RaggedDepth, "path length differs from depth " + std::to_string(depth), to_string(prefix));
      }
      prefix.push_back(v);
      part.children.push_back(child.is_null() ? kLeaf : rec(child));
      prefix.pop_back();
      part.values.push_back(std::move(v));
    }
    nodes.push_back(std::move(part));
    return static_cast<NodeId>(nodes.size() - 1);
  };
  const NodeId root = rec(need(j, "root"));
  return CellRepresentation(dim, depth, std::move(nodes), root);
}

Json transport_to_json(const std::vector<StepTransport>& steps) {
  Json out;
  out["format_version"] = kFormatVersion;
  Json js = Json::array();
  for (const StepTransport& st : steps) {
    Json sections = Json::array();
    for (const TransportMap& t : st.sections) {
      Json pieces = Json::array();
      for (const TransportPiece& p : t.pieces) {
        pieces.push_back(Json::array({interval_to_json(p.source), interval_to_json(p.target)}));
      }
      sections.push_back(Json{{"history", path_to_json(t.history)}, {"pieces", std::move(pieces)}});
    }
    js.push_back(Json{{"step", st.step}, {"sections", std::move(sections)}});
  }
  out["steps"] = std::move(js);
  return out;
}

std::vector<StepTransport> transport_from_json(const Json& j) {
  check_version(j);
  std::vector<StepTransport> out;
  for (const Json& js : need(j, "steps")) {
    StepTransport st;
    st.step = need_size(js, "step");
    for (const Json& sec : need(js, "sections")) {
      TransportMap t;
      for (const Json& v : need(sec, "history")) t.history.push_back(value_from_json(v));
      for (const Json& p : need(sec, "pieces")) {
        if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::Parse, "a piece is [source, target]");
        t.pieces.push_back(TransportPiece{interval_from_json(p[0]), interval_from_json(p[1])});
      }
      st.sections.push_back(std::move(t));
    }
    out.push_back(std::move(st));
  }
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed JSON: ") + e.what(), path);
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string sums_csv(const SampleBatch& batch) {
  std::ostringstream out;
  const std::vector<Vec> sd = path_sums(batch, 0);
  const std::vector<Vec> se = batch.is_pair() ? path_sums(batch, 1) : std::vector<Vec>{};
  const std::size_t dim = sd.empty() ? 0 : sd.front().size();
  out << "m";
  for (std::size_t c = 0; c < dim; ++c) out << ",d" << c;
  if (batch.is_pair()) {
    for (std::size_t c = 0; c < dim; ++c) out << ",e" << c;
  }
  out << "\n";
  for (std::size_t m = 0; m < sd.size(); ++m) {
    out << m;
    for (double x : sd[m]) out << "," << format_double(x);
    if (batch.is_pair()) {
      for (double x : se[m]) out << "," << format_double(x);
    }
    out << "\n";
  }
  return out.str();
}

std::string trajectories_csv(const std::vector<EmbeddedPath>& paths) {
  std::ostringstream out;
  const std::size_t dim = paths.empty() ? 0 : paths.front().values.front().size();
  out << "m,t";
  for (std::size_t c = 0; c < dim; ++c) out << ",F" << c;
  out << "\n";
  for (std::size_t m = 0; m < paths.size(); ++m) {
    const EmbeddedPath& p = paths[m];
    for (std::size_t k = 0; k < p.times.size(); ++k) {
      out << m << "," << format_double(p.times[k]);
      for (double x : p.values[k]) out << "," << format_double(x);
      out << "\n";
    }
  }
  return out.str();
}

std::string trajectories_svg(const std::vector<EmbeddedPath>& paths, std::size_t max_paths) {
  const std::size_t count = std::min(paths.size(), max_paths);
  constexpr double kWidth = 640, kHeight = 400, kMargin = 48;
  double t_max = 1, y_min = 0, y_max = 0;
  for (std::size_t m = 0; m < count; ++m) {
    t_max = std::max(t_max, paths[m].times.back());
    for (const Vec& v : paths[m].values) {
      y_min = std::min(y_min, v.front());
      y_max = std::max(y_max, v.front());
    }
  }
  if (y_max - y_min < 1e-12) {
    y_min -= 1;
    y_max += 1;
  }
  auto sx = [&](double t) { return kMargin + (kWidth - 2 * kMargin) * t / t_max; };
  auto sy = [&](double y) { return kHeight - kMargin - (kHeight - 2 * kMargin) * (y - y_min) / (y_max - y_min); };
  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << sy(0) << "\" x2=\"" << kWidth - kMargin << "\" y2=\"" << sy(0)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">t</text>\n";
  out << "<text x=\"14\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\">F_t[0]</text>\n";
  for (int n = 0; n <= static_cast<int>(std::ceil(t_max)); ++n) {
    out << "<text x=\"" << sx(n) << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
        << n << "</text>\n";
  }
  out << "<text x=\"" << kMargin - 6 << "\" y=\"" << sy(y_max) << "\" text-anchor=\"end\" font-size=\"11\">"
      << format_double(y_max) << "</text>\n";
  out << "<text x=\"" << kMargin - 6 << "\" y=\"" << sy(y_min) << "\" text-anchor=\"end\" font-size=\"11\">"
      << format_double(y_min) << "</text>\n";
  for (std::size_t m = 0; m < count; ++m) {
    const double hue = 360.0 * static_cast<double>(m) / static_cast<double>(std::max<std::size_t>(count, 1));
    out << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"hsl(" << hue << ",70%,40%)\" points=\"";
    for (std::size_t k = 0; k < paths[m].times.size(); ++k) {
      out << (k ? " " : "") << sx(paths[m].times[k]) << "," << sy(paths[m].values[k].front());
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace canonrep
