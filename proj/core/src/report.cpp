#include "pegtrace/report.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "pegtrace/coincidence.hpp"
#include "pegtrace/generator.hpp"
#include "pegtrace/polygon_io.hpp"
#include "pegtrace/shape_invariant.hpp"
#include "pegtrace/svg.hpp"

namespace pegtrace {

namespace {

using nlohmann::json;

json config_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["input"] = cfg.input;
  j["seed"] = cfg.seed;
  j["grid"] = cfg.grid;
  j["svg"] = cfg.svg;
  j["dump"] = cfg.dump;
  j["check"] = cfg.check;
  j["ngon"] = cfg.ngon;
  j["count"] = cfg.count;
  j["trace"] = {{"h0_rel", cfg.trace.h0_rel},
                {"h_max_rel", cfg.trace.h_max_rel},
                {"corrector_tol_rel", cfg.trace.corrector_tol_rel},
                {"eps_deg_rel", cfg.trace.eps_deg_rel},
                {"wall_tol_rel", cfg.trace.wall_tol_rel},
                {"max_steps", cfg.trace.max_steps},
                {"loop_grid", cfg.trace.loop_grid}};
  return j;
}

const char* endpoint_kind_name(EndpointKind k) {
  return k == EndpointKind::Vertex ? "vertex" : "edge-interior";
}

const char* extremum_name(Extremum e) {
  switch (e) {
    case Extremum::Min: return "min";
    case Extremum::Max: return "max";
    case Extremum::Saddle: return "saddle";
    case Extremum::Flat: return "flat";
  }
  return "?";
}

json diameter_json(const Diameter& d) {
  json j;
  j["q1"] = {{"x", d.q1.p.x}, {"y", d.q1.p.y}, {"s", d.q1.s},
             {"kind", endpoint_kind_name(d.q1.kind)}, {"index", d.q1.index}};
  j["q2"] = {{"x", d.q2.p.x}, {"y", d.q2.p.y}, {"s", d.q2.s},
             {"kind", endpoint_kind_name(d.q2.kind)}, {"index", d.q2.index}};
  j["length"] = d.length;
  j["orientation"] =
      d.orientation == Orientation::Positive ? "positive" : "negative";
  j["extremum"] = extremum_name(d.extremum);
  j["stable"] = d.stable;
  j["tricky"] = d.tricky;
  return j;
}

json endpoint_json(const std::optional<ComponentEndpoint>& e) {
  if (!e) return "loop";
  return json{{"diameter", e->diameter}, {"shift", e->shift}};
}

json component_json(const ArcComponent& c, bool with_samples) {
  json j;
  j["class"] = component_class_name(c.cls);
  j["shift"] = c.shift;
  j["orbit"] = c.orbit;
  j["endpoints"] = json::array({endpoint_json(c.end0), endpoint_json(c.end1)});
  j["length"] = c.length();
  j["sample_count"] = c.samples.size();
  j["inscribing"] = json::array();
  for (const EdgeQuadruple& q : c.inscribing) {
    const auto idx = q.indices();
    j["inscribing"].push_back({idx[0], idx[1], idx[2], idx[3]});
  }
  if (with_samples) {
    j["samples"] = json::array();
    for (const TraceSample& s : c.samples) {
      j["samples"].push_back({s.rect[0].x, s.rect[0].y, s.rect[1].x,
                              s.rect[1].y, s.rect[2].x, s.rect[2].y,
                              s.rect[3].x, s.rect[3].y, s.rect.X, s.rect.Y});
    }
  }
  return j;
}

int code_for(const PegError& e) {
  switch (e.code()) {
    case ErrorCode::StepBudgetExhausted:
    case ErrorCode::CorrectorDivergence:
    case ErrorCode::UnmatchedTerminalDiameter:
    case ErrorCode::RepeatBoundViolated:
    case ErrorCode::DeadEnd:
    case ErrorCode::NoViableChart:
      return kExitTracerFault;
    default:
      return kExitInputError;
  }
}

}  // namespace

CommandResult cmd_diameters(const RunConfig& cfg) {
  CommandResult res;
  const Polygon p = load_polygon(cfg.input);
  const DiameterReport rep = analyze_diameters(p);

  json j;
  j["config"] = config_json(cfg);
  j["delta_plus"] = rep.delta_plus();
  j["positive"] = json::array();
  for (const Diameter& d : rep.positive) j["positive"].push_back(diameter_json(d));
  j["negative"] = json::array();
  for (const Diameter& d : rep.negative) j["negative"].push_back(diameter_json(d));
  j["degenerate_families"] = rep.degenerate_families.size();
  j["undecided"] = rep.undecided.size();
  j["has_tricky"] = rep.has_tricky();
  j["non_generic"] =
      !rep.degenerate_families.empty() || rep.has_tricky() || !rep.undecided.empty();
  res.files.emplace_back("diameters.json", j.dump(2) + "\n");
  if (cfg.svg) {
    res.files.emplace_back("diameters.svg",
                           svg_polygon_diameters(p, rep.positive));
  }
  std::ostringstream ss;
  ss << "delta_plus=" << rep.delta_plus()
     << " negative=" << rep.negative.size()
     << " degenerate_families=" << rep.degenerate_families.size()
     << (rep.has_tricky() ? " [tricky diameters present]" : "");
  res.summary = ss.str();
  return res;
}

CommandResult cmd_trace(const RunConfig& cfg) {
  CommandResult res;
  const Polygon p = load_polygon(cfg.input);
  TraceConfig tc = cfg.trace;
  const auto comps = trace_all(p, tc);

  json j;
  j["config"] = config_json(cfg);
  j["component_count"] = comps.size();
  j["delta_plus"] = delta_plus(p);
  j["components"] = json::array();
  for (const ArcComponent& c : comps) {
    j["components"].push_back(component_json(c, cfg.dump));
  }
  if (cfg.check) {
    const auto chk = oracle_equivalence(p, comps, cfg.grid,
                                        tc.h_max_rel * p.perimeter());
    j["oracle_check"] = {{"hits", chk.hits},
                         {"forward_ok", chk.forward_ok},
                         {"forward_max", chk.forward_max},
                         {"backward_ok", chk.backward_ok},
                         {"backward_max", chk.backward_max}};
    if (!chk.forward_ok || !chk.backward_ok) {
      res.exit_code = kExitVerificationFailed;
    }
  }
  res.files.emplace_back("trace.json", j.dump(2) + "\n");
  if (cfg.svg) {
    res.files.emplace_back("trace.svg", svg_shape_curves(p, comps));
  }
  std::ostringstream ss;
  ss << "components=" << comps.size() << " (2*delta_plus="
     << 2 * delta_plus(p) << ")";
  res.summary = ss.str();
  return res;
}

CommandResult cmd_verify(const RunConfig& cfg) {
  CommandResult res;
  const Polygon p = load_polygon(cfg.input);
  TraceConfig tc = cfg.trace;
  const auto comps = trace_all(p, tc);

  json j;
  j["config"] = config_json(cfg);
  j["area"] = p.area();
  j["components"] = json::array();
  bool all_pass = true;
  for (const ArcComponent& c : comps) {
    const SweepReport rep = verify_sweep(p, c, tc);
    all_pass = all_pass && rep.pass;
    // Second-order check of the pointwise identity along this component.
    const double spacing = 0.02 * p.perimeter();
    const double r1 = check_differential(p, c, spacing);
    const double r2 = check_differential(p, c, spacing / 2);
    j["components"].push_back(
        {{"class", component_class_name(c.cls)},
         {"shape_area", rep.loop_area},
         {"target", rep.target},
         {"residual", rep.residual},
         {"tolerance", rep.tolerance},
         {"pass", rep.pass},
         {"differential", {{"spacing", spacing},
                           {"residual", r1},
                           {"residual_half", r2}}}});
  }
  j["all_pass"] = all_pass;
  res.files.emplace_back("verify.json", j.dump(2) + "\n");
  if (!all_pass) res.exit_code = kExitVerificationFailed;
  std::ostringstream ss;
  ss << "components=" << comps.size() << " all_pass=" << (all_pass ? "yes" : "no");
  res.summary = ss.str();
  return res;
}

CommandResult cmd_coincidences(const RunConfig& cfg) {
  CommandResult res;
  const Polygon p = load_polygon(cfg.input);
  TraceConfig tc = cfg.trace;
  const auto comps = trace_all(p, tc);
  const CoincidenceReport rep = count_M(p, comps, tc);

  json j;
  j["config"] = config_json(cfg);
  j["M"] = rep.M;
  j["delta_plus"] = rep.delta_plus;
  j["bound_generic"] = rep.bound_generic;
  j["bound_nontricky"] = rep.bound_nontricky;
  j["pass_generic"] = rep.pass_generic;
  j["pass_nontricky"] = rep.pass_nontricky;
  j["dropped"] = rep.dropped;
  j["infinite_families"] = rep.infinite_families;
  j["clusters"] = json::array();
  for (const Coincidence& c : rep.clusters) {
    json cl;
    cl["X"] = c.X;
    cl["Y"] = c.Y;
    cl["mu"] = c.mu;
    cl["low_confidence"] = c.low_confidence;
    cl["participants"] = json::array();
    for (const Participant& q : c.participants) {
      cl["participants"].push_back(
          {{"component", q.component},
           {"arclen", q.arclen},
           {"rect", {q.rect[0].x, q.rect[0].y, q.rect[1].x, q.rect[1].y,
                     q.rect[2].x, q.rect[2].y, q.rect[3].x, q.rect[3].y}}});
    }
    j["clusters"].push_back(cl);
  }
  res.files.emplace_back("coincidences.json", j.dump(2) + "\n");
  if (!rep.pass_generic || !rep.pass_nontricky) {
    res.exit_code = kExitVerificationFailed;
  }
  std::ostringstream ss;
  ss << "M=" << rep.M << " delta_plus=" << rep.delta_plus << " bound="
     << rep.bound_generic << " pass=" << (rep.pass_generic ? "yes" : "no");
  res.summary = ss.str();
  return res;
}

CommandResult cmd_generate(const RunConfig& cfg) {
  CommandResult res;
  GeneratorOptions opt;
  opt.vertices = cfg.ngon;
  opt.count = cfg.count;
  opt.seed = cfg.seed;
  const auto polys = generate_polygons(opt);
  for (size_t i = 0; i < polys.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "polygon_%03zu.json", i);
    res.files.emplace_back(name, polygon_to_json(polys[i]));
  }
  std::ostringstream ss;
  ss << "generated " << polys.size() << " polygons with " << cfg.ngon
     << " vertices (seed " << cfg.seed << ")";
  res.summary = ss.str();
  return res;
}

CommandResult run_command(const RunConfig& cfg) {
  try {
    if (cfg.command == "diameters") return cmd_diameters(cfg);
    if (cfg.command == "trace") return cmd_trace(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "coincidences") return cmd_coincidences(cfg);
    if (cfg.command == "generate") return cmd_generate(cfg);
    CommandResult res;
    res.exit_code = kExitInputError;
    res.summary = "unknown command: " + cfg.command;
    return res;
  } catch (const PegError& e) {
    CommandResult res;
    res.exit_code = code_for(e);
    res.summary = e.what();
    return res;
  }
}

int execute_and_write(const RunConfig& cfg, std::string* summary_out) {
  const CommandResult res = run_command(cfg);
  if (!res.files.empty()) {
    std::filesystem::create_directories(cfg.outdir);
    for (const auto& [name, content] : res.files) {
      write_file((std::filesystem::path(cfg.outdir) / name).string(), content);
    }
  }
  if (summary_out) *summary_out = res.summary;
  return res.exit_code;
}

}  // namespace pegtrace
