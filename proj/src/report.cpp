#include "smcp/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "smcp/error.hpp"
#include "smcp/format.hpp"

namespace smcp {

namespace {

using Json = nlohmann::ordered_json;

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_significant(x, 9);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_csv_row(const ExperimentReport& r) {
  std::ostringstream out;
  out << csv_field(r.instance) << ',' << r.algorithm << ',' << r.seed << ',' << r.trials << ','
      << format_number(r.mean_alg) << ',' << format_number(r.mean_opt) << ',' << r.opt_mode
      << ',' << format_number(r.ratio) << ',' << format_number(r.ci95) << '\n';
  return out.str();
}

std::string report_to_csv(const ExperimentReport& r) {
  return std::string(kReportCsvHeader) + "\n" + report_csv_row(r);
}

std::string report_to_json(const ExperimentReport& r) {
  Json doc;
  doc["instance"] = r.instance;
  doc["algo"] = r.algorithm;
  doc["seed"] = r.seed;
  doc["trials"] = r.trials;
  doc["mean_alg"] = number(r.mean_alg);
  doc["alg_ci95"] = number(r.alg_half_width);
  doc["mean_opt"] = number(r.mean_opt);
  doc["opt_mode"] = r.opt_mode;
  doc["opt_trials"] = r.opt_trials;
  doc["opt_ci95"] = number(r.opt_half_width);
  doc["ratio"] = number(r.ratio);
  doc["ci95"] = number(r.ci95);
  doc["config"] = {{"alpha", number(r.alpha)},
                   {"q_mode", r.q_mode},
                   {"samples", r.samples},
                   {"zeta", number(r.zeta)}};
  doc["alg_sizes"] = r.alg_sizes;
  if (!r.opt_sizes.empty()) doc["opt_sizes"] = r.opt_sizes;
  return doc.dump(2) + "\n";
}

std::string q_estimate_to_json(const ProbGraph& g, const QEstimate& est) {
  Json doc;
  doc["n"] = g.vertex_count();
  doc["mode"] = est.mode == QMode::kExact ? "exact" : "monte-carlo";
  doc["matcher"] = est.matcher.kind == Matcher::Kind::kMaximum ? "maximum" : "approx";
  if (est.matcher.kind == Matcher::Kind::kApprox) doc["zeta"] = number(est.matcher.zeta);
  doc["samples"] = est.samples_used;
  doc["total"] = number(est.total());
  Json pairs = Json::array();
  for (std::size_t i = 0; i < est.pairs.size(); ++i) {
    const Pair e = est.pairs[i];
    pairs.push_back({{"u", e.u}, {"v", e.v}, {"p", number(g.p(e.u, e.v))}, {"q", number(est.q[i])}});
  }
  doc["pairs"] = std::move(pairs);
  Json totals = Json::array();
  for (const double x : est.vertex_totals(g.vertex_count())) totals.push_back(number(x));
  doc["vertex_totals"] = std::move(totals);
  return doc.dump(2) + "\n";
}

SamplerCheck sampler_check(const TargetProfile& profile) {
  profile.validate();
  SamplerCheck check;
  check.profile = profile;
  check.margin = feasibility_margin(profile);
  check.feasible = check.margin >= 1.0 - kFeasibilityTolerance;

  TargetProfile scaled = profile;
  if (std::isfinite(check.margin)) {
    for (std::size_t i = 0; i < scaled.size(); ++i) {
      // Events that can never occur keep no target; the rest is scaled.
      scaled.r[i] = scaled.p[i] > 0.0 ? scaled.r[i] * check.margin : 0.0;
    }
  }
  const OrderPolicy policy = build_policy(scaled);
  check.scaled.resize(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) check.scaled[i] = scaled.r[i] * policy.scale();
  check.achieved = policy.first_occurrence_probs(profile.p);
  check.nodes = policy.node_count();
  double none = 1.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    check.total += check.achieved[i];
    none *= 1.0 - profile.p[i];
  }
  check.any_occurs = 1.0 - none;
  check.met = true;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (check.achieved[i] < profile.r[i] - kFeasibilityTolerance) check.met = false;
  }
  return check;
}

std::string sampler_check_text(const SamplerCheck& c) {
  std::ostringstream out;
  out << "margin " << format_number(c.margin) << (c.feasible ? " (feasible)" : " (infeasible)")
      << "\n";
  out << "event\tp\ttarget\tscaled\tachieved\tmet\n";
  for (std::size_t i = 0; i < c.profile.size(); ++i) {
    const bool ok = c.achieved[i] >= c.profile.r[i] - kFeasibilityTolerance;
    out << i << '\t' << format_number(c.profile.p[i]) << '\t' << format_number(c.profile.r[i])
        << '\t' << format_number(c.scaled[i]) << '\t' << format_number(c.achieved[i]) << '\t'
        << (ok ? "yes" : "no") << '\n';
  }
  out << "sum achieved " << format_number(c.total) << ", P(any event) "
      << format_number(c.any_occurs) << ", policy nodes " << c.nodes << "\n";
  return out.str();
}

std::string sampler_check_json(const SamplerCheck& c) {
  Json doc;
  doc["margin"] = number(c.margin);
  doc["feasible"] = c.feasible;
  doc["met"] = c.met;
  Json events = Json::array();
  for (std::size_t i = 0; i < c.profile.size(); ++i) {
    events.push_back({{"event", i},
                      {"p", number(c.profile.p[i])},
                      {"target", number(c.profile.r[i])},
                      {"scaled", number(c.scaled[i])},
                      {"achieved", number(c.achieved[i])}});
  }
  doc["events"] = std::move(events);
  doc["sum_achieved"] = number(c.total);
  doc["any_occurs"] = number(c.any_occurs);
  doc["nodes"] = c.nodes;
  return doc.dump(2) + "\n";
}

TargetProfile profile_from_json(std::string_view text) {
  TargetProfile profile;
  try {
    const auto doc = nlohmann::json::parse(text);
    profile.p = doc.at("p").get<std::vector<double>>();
    profile.r = doc.at("r").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed profile: ") + e.what());
  }
  profile.validate();
  return profile;
}

std::string hardness_text(const Hardness& h) {
  return "online " + format_number(h.online) + "\noffline " + format_number(h.offline) +
         "\nratio " + format_number(h.ratio) + "\n";
}

std::string hardness_json(const Hardness& h) {
  Json doc;
  doc["online"] = number(h.online);
  doc["offline"] = number(h.offline);
  doc["ratio"] = number(h.ratio);
  return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace smcp
