#include "pfr/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace pfr::io {

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

int log2_exact(std::size_t len) {
  if (len == 0 || (len & (len - 1)) != 0) throw ParseError("dense weight vector length must be a power of two");
  int n = 0;
  while ((std::size_t{1} << n) < len) ++n;
  return n;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

}  // namespace

json to_json(const Dist& x) {
  json entries = json::array();
  for (const auto& [e, w] : x.sparse()) entries.push_back({e, static_cast<double>(w)});
  return {{"dim", x.dim()}, {"arity", 1}, {"entries", std::move(entries)}};
}

json to_json(const JointDist& j) {
  json entries = json::array();
  j.for_each([&](Key k, Real w) {
    json row = json::array();
    for (int a = 0; a < j.arity(); ++a) row.push_back(j.component(k, a));
    row.push_back(static_cast<double>(w));
    entries.push_back(std::move(row));
  });
  return {{"dim", j.dim()}, {"arity", j.arity()}, {"labels", j.labels()}, {"entries", std::move(entries)}};
}

JointDist joint_from_json(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const int arity = j.value("arity", 1);
    std::vector<std::string> labels;
    if (j.contains("labels")) {
      labels = j.at("labels").get<std::vector<std::string>>();
    } else {
      for (int a = 0; a < arity; ++a) labels.push_back("X" + std::to_string(a));
    }
    JointEntries<Real> entries;
    for (const auto& row : j.at("entries")) {
      if (!row.is_array() || static_cast<int>(row.size()) != arity + 1) {
        throw ParseError("each entry must hold arity indices and a weight");
      }
      Key k = 0;
      for (int a = 0; a < arity; ++a) {
        const auto e = row[static_cast<std::size_t>(a)].get<std::uint64_t>();
        if (e >= group_order(dim)) throw ParseError("entry index out of range");
        k |= Key{e} << (a * dim);
      }
      entries.emplace_back(k, static_cast<Real>(row[static_cast<std::size_t>(arity)].get<double>()));
    }
    return JointDist(dim, arity, std::move(labels), std::move(entries));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed distribution JSON: ") + e.what());
  }
}

Dist dist_from_json(const json& j) {
  const auto joint = joint_from_json(j);
  if (joint.arity() != 1) throw ParseError("expected an arity-1 distribution");
  return joint.marginal_dist(0);
}

Dist read_dist_csv(std::istream& in) {
  std::vector<Real> values;
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    for (char& c : line) {
      if (c == ',' || c == ';') c = ' ';
    }
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw ParseError("bad number '" + tok + "'");
        values.push_back(static_cast<Real>(v));
      } catch (const std::logic_error&) {
        throw ParseError("bad number '" + tok + "'");
      }
    }
  }
  const int n = log2_exact(values.size());
  Vec<Real> w(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) w(static_cast<Eigen::Index>(i)) = values[i];
  return Dist(n, std::move(w));
}

SetInput read_set(std::istream& in) {
  int dim = -1;
  std::vector<Elem> elems;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    if (line.rfind("dim=", 0) == 0) {
      if (dim >= 0) throw ParseError("duplicate dim= header");
      try {
        dim = std::stoi(line.substr(4));
      } catch (const std::logic_error&) {
        throw ParseError("bad dim= header");
      }
      continue;
    }
    if (dim < 0) throw ParseError("set file must start with a dim=n header");
    try {
      elems.push_back(parse_elem(line));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
  if (dim < 0) throw ParseError("set file must start with a dim=n header");
  try {
    return SetInput(dim, std::move(elems));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

void write_set(std::ostream& out, const SetInput& a) {
  out << "dim=" << a.dim() << '\n';
  for (Elem x : a.elements()) out << format_bin(x, a.dim()) << '\n';
}

std::string read_file(const std::string& path) {
  auto in = open(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SetInput load_set(const std::string& path) {
  auto in = open(path);
  return read_set(in);
}

Dist load_dist(const std::string& path) {
  const std::string text = read_file(path);
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && text[start] == '{') {
    try {
      return dist_from_json(json::parse(text));
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed JSON in '") + path + "': " + e.what());
    }
  }
  std::istringstream in(text);
  if (text.find("dim=") != std::string::npos) {
    const auto a = read_set(in);
    return Dist::uniform(a.elements(), a.dim());
  }
  return read_dist_csv(in);
}

json to_json(const SubgroupBasis& h) {
  json rows = json::array();
  for (Elem r : h.rows()) rows.push_back(format_bin(r, h.ambient_dim()));
  return {{"ambient_dim", h.ambient_dim()}, {"rank", h.rank()}, {"rows", std::move(rows)}};
}

SubgroupBasis subgroup_from_json(const json& j) {
  try {
    const int dim = j.at("ambient_dim").get<int>();
    std::vector<Elem> rows;
    for (const auto& r : j.at("rows")) rows.push_back(parse_elem(r.get<std::string>()));
    return SubgroupBasis::span(rows, dim);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed subgroup JSON: ") + e.what());
  }
}

json to_json(const IneqReport& r) {
  return {{"name", r.name}, {"lhs", number(r.lhs)}, {"rhs", number(r.rhs)},
          {"slack", number(r.slack)}, {"holds", r.holds}};
}

json to_json(const FibringReport& r) {
  return {{"d_total", r.d_total}, {"d_projected", r.d_projected}, {"d_fibre", r.d_fibre},
          {"info_term", r.info_term}, {"residual", r.residual}};
}

json to_json(const BsgReport& r) {
  return {{"lhs", r.lhs}, {"i_ab", r.i_ab}, {"rhs", r.rhs}, {"slack", r.slack}, {"holds", r.holds}};
}

json to_json(const EndgameTables& t, bool include_table) {
  json out = {{"k", static_cast<double>(t.k)},
              {"i1", static_cast<double>(t.i1)},
              {"i2", static_cast<double>(t.i2)},
              {"i3", static_cast<double>(t.i3)},
              {"h_s", static_cast<double>(t.h_s)},
              {"support_size", t.joint_uvs.support_size()}};
  if (include_table) out["joint_uvs"] = to_json(t.joint_uvs);
  return out;
}

json to_json(const Move& m) {
  json out = {{"kind", std::string(to_string(m.kind))}};
  switch (m.kind) {
    case MoveKind::FibreCross:
    case MoveKind::FibreSelf:
      out["g1"] = m.g;
      out["g2"] = m.g2;
      break;
    case MoveKind::Endgame:
      out["s"] = m.s;
      out["perm"] = m.perm;
      out["t"] = m.t;
      break;
    default:
      break;
  }
  return out;
}

json to_json(const TraceStep& s) {
  json best = json::object();
  for (MoveKind k : kMoveKinds) best[std::string(to_string(k))] = number(s.class_best[static_cast<std::size_t>(k)]);
  return {{"move", to_json(s.move)},
          {"tau_before", s.tau_before},
          {"tau_after", s.tau_after},
          {"k_after", s.k_after},
          {"class_best", std::move(best)}};
}

json to_json(const MinimizerDiagnostics& d) {
  json reports = json::array();
  for (const auto& r : d.reports) reports.push_back(to_json(r));
  return {{"k", d.k}, {"eta", d.eta}, {"i1", d.i1}, {"i2", d.i2}, {"i3", d.i3}, {"h_s", d.h_s},
          {"reports", std::move(reports)}};
}

json to_json(const DescentState& st) {
  json trace = json::array();
  for (const auto& s : st.trace) trace.push_back(to_json(s));
  json out = {{"eta", static_cast<double>(st.ref.eta)},
              {"k", static_cast<double>(st.k)},
              {"tau", static_cast<double>(st.tau)},
              {"iterations", st.trace.size()},
              {"converged", st.converged},
              {"max_iter_reached", st.max_iter_reached},
              {"trace", std::move(trace)},
              {"notes", st.notes},
              {"x1", to_json(st.x1)},
              {"x2", to_json(st.x2)}};
  // The minimizer estimates are dumped only for runs that stopped short.
  if (!st.converged && st.diagnostics) out["diagnostics"] = to_json(*st.diagnostics);
  return out;
}

json to_json(const SubgroupCertificate& c) {
  return {{"subgroup", to_json(c.h)},
          {"d1", c.d1},
          {"d2", c.d2},
          {"reference", c.reference},
          {"sum_bound", c.sum_bound},
          {"individual_bound", c.individual_bound},
          {"holds", c.holds},
          {"converged", c.converged},
          {"source", c.source}};
}

json to_json(const CosetCover& c) {
  json translates = json::array();
  for (Elem t : c.translates) translates.push_back(format_bin(t, c.hp.ambient_dim()));
  return {{"subgroup", to_json(c.hp)},
          {"translates", std::move(translates)},
          {"num_translates", c.translates.size()},
          {"doubling_constant", c.k},
          {"c_exponent", c.c_used},
          {"translate_bound", c.bound},
          {"cover_verified", c.cover_verified},
          {"certified", c.certified},
          {"entropic_subgroup", to_json(c.h)},
          {"subgroup_source", c.h_source},
          {"shift", format_bin(c.x0, c.hp.ambient_dim())},
          {"overlap", c.overlap},
          {"packing_size", c.packing_size},
          {"bridge_distance", c.bridge_distance},
          {"bridge_holds", c.bridge_holds},
          {"descent_converged", c.descent_converged},
          {"entropic_certificate", to_json(c.entropic)}};
}

}  // namespace pfr::io
