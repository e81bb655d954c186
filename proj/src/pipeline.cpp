#include "fmb/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "fmb/csv.hpp"
#include "fmb/error.hpp"
#include "fmb/rng.hpp"
#include "fmb/tableau.hpp"

namespace fmb {
namespace {

using nlohmann::json;

bool is_sampler_failure(ErrorCode c) {
  return c == ErrorCode::BadBenchmarkDepth || c == ErrorCode::DensityInfeasible || c == ErrorCode::NoEdges;
}

int integer_feature(double v, const char* name) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be an integer");
  return static_cast<int>(r);
}

std::uint64_t role_tag(CircuitRole r) { return r == CircuitRole::Main ? 0 : 1; }

const Circuit& circuit_for(const BatchEntry& e, CircuitRole role) {
  if (role == CircuitRole::Main) return e.circuit;
  if (!e.null_circuit) throw Error(ErrorCode::InvalidArgument, "entry has no reference circuit");
  return *e.null_circuit;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view to_string(CircuitFamily f) { return f == CircuitFamily::Mirror ? "mirror" : "fixed_density"; }

CircuitFamily circuit_family_from_string(std::string_view s) {
  if (s == "mirror") return CircuitFamily::Mirror;
  if (s == "fixed_density" || s == "fixed-density") return CircuitFamily::FixedDensity;
  throw Error(ErrorCode::InvalidArgument, "unknown circuit family '" + std::string(s) + "'");
}

std::string_view to_string(CircuitRole r) { return r == CircuitRole::Main ? "main" : "null"; }

CircuitRole circuit_role_from_string(std::string_view s) {
  if (s == "main" || s.empty()) return CircuitRole::Main;
  if (s == "null") return CircuitRole::Null;
  throw Error(ErrorCode::ParseError, "unknown circuit role '" + std::string(s) + "'");
}

CircuitBatch sample_batch(const DesignPlan& design, EstimatorKind estimator, const SamplingConfig& cfg, std::uint64_t seed,
                          std::string design_ref) {
  design.validate();
  const auto wi = design.space.index_of("w"), di = design.space.index_of("d"), xi_i = design.space.index_of("xi");
  if (!wi || !di) throw Error(ErrorCode::InvalidArgument, "design needs axes named w and d");
  if (estimator == EstimatorKind::SuccessProbability && cfg.family != CircuitFamily::Mirror)
    throw Error(ErrorCode::InvalidArgument, "success probability needs definite-outcome (mirror) circuits");

  CircuitBatch batch;
  batch.design = std::move(design_ref);
  batch.seed = seed;
  batch.family = cfg.family;
  batch.estimator = estimator;
  batch.k = design.k;
  batch.m = static_cast<int>(design.vectors.size());
  const std::size_t total = design.vectors.size() * static_cast<std::size_t>(design.k);
  batch.entries.resize(total);
  std::vector<std::exception_ptr> errors(total);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
    auto& e = batch.entries[static_cast<std::size_t>(idx)];
    e.i = static_cast<int>(idx / design.k);
    e.j = static_cast<int>(idx % design.k);
    try {
      const auto& v = design.vectors[static_cast<std::size_t>(e.i)];
      const int w = integer_feature(v[static_cast<std::size_t>(*wi)], "w");
      const int d = integer_feature(v[static_cast<std::size_t>(*di)], "d");
      const double xi = xi_i ? v[static_cast<std::size_t>(*xi_i)] : cfg.default_xi;
      const auto iu = static_cast<std::uint64_t>(e.i), ju = static_cast<std::uint64_t>(e.j);
      Rng rng = make_rng(seed, {kTagSample, iu, ju});
      const Circuit c = cfg.family == CircuitFamily::Mirror
                            ? sample_mirror_circuit(w, d, xi, {cfg.connectivity, cfg.qubits}, rng)
                            : sample_fixed_density_circuit(w, d, xi, {cfg.connectivity, cfg.qubits, 64}, rng);
      if (estimator == EstimatorKind::SuccessProbability) {
        e.circuit = c;
        e.target = simulate_ideal_output(c);
      } else {
        Rng brng = make_rng(seed, {kTagBundle, iu, ju});
        auto b = build_srdfe_bundle(c, brng);
        e.circuit = std::move(b.circuit);
        e.p3 = std::move(b.p3);
        e.null_circuit = std::move(b.null_circuit);
        e.null_p3 = std::move(b.null_p3);
      }
    } catch (const Error& err) {
      if (is_sampler_failure(err.code()))
        e.error = err.what();
      else
        errors[static_cast<std::size_t>(idx)] = std::current_exception();
    } catch (...) {
      errors[static_cast<std::size_t>(idx)] = std::current_exception();
    }
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return batch;
}

std::string batch_to_json(const CircuitBatch& b) {
  json entries = json::array();
  for (const auto& e : b.entries) {
    json j = {{"i", e.i}, {"j", e.j}};
    if (!e.ok()) {
      j["error"] = e.error;
    } else {
      j["circuit"] = serialize(e.circuit);
      if (e.target) j["target"] = *e.target;
      if (e.p3) j["p3"] = e.p3->to_string();
      if (e.null_circuit) j["null_circuit"] = serialize(*e.null_circuit);
      if (e.null_p3) j["null_p3"] = e.null_p3->to_string();
    }
    entries.push_back(std::move(j));
  }
  json doc = {{"design", b.design},
              {"seed", b.seed},
              {"family", to_string(b.family)},
              {"estimator", to_string(b.estimator)},
              {"k", b.k},
              {"m", b.m},
              {"entries", entries}};
  return doc.dump(1) + "\n";
}

CircuitBatch batch_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    CircuitBatch b;
    b.design = doc.at("design").get<std::string>();
    b.seed = doc.at("seed").get<std::uint64_t>();
    b.family = circuit_family_from_string(doc.at("family").get<std::string>());
    b.estimator = estimator_from_string(doc.at("estimator").get<std::string>());
    b.k = doc.at("k").get<int>();
    b.m = doc.at("m").get<int>();
    for (const auto& j : doc.at("entries")) {
      BatchEntry e;
      e.i = j.at("i").get<int>();
      e.j = j.at("j").get<int>();
      if (j.contains("error")) {
        e.error = j.at("error").get<std::string>();
      } else {
        e.circuit = parse_circuit(j.at("circuit").get<std::string>());
        if (j.contains("target")) e.target = j.at("target").get<std::string>();
        if (j.contains("p3")) e.p3 = PauliOperator::parse(j.at("p3").get<std::string>());
        if (j.contains("null_circuit")) e.null_circuit = parse_circuit(j.at("null_circuit").get<std::string>());
        if (j.contains("null_p3")) e.null_p3 = PauliOperator::parse(j.at("null_p3").get<std::string>());
        const bool srdfe = b.estimator == EstimatorKind::Srdfe;
        if (srdfe ? !(e.p3 && e.null_circuit && e.null_p3) : !e.target)
          throw Error(ErrorCode::ParseError, "batch entry (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                                 ") lacks the fields its estimator needs");
      }
      b.entries.push_back(std::move(e));
    }
    return b;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("batch file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, std::string("batch file: ") + e.what());
  }
}

Counts NoiselessBackend::execute(const BatchEntry& e, CircuitRole role, std::uint64_t shots, std::uint64_t seed) const {
  return run_shots(compile(circuit_for(e, role)), shots, seed);
}

Counts NoisyBackend::execute(const BatchEntry& e, CircuitRole role, std::uint64_t shots, std::uint64_t seed) const {
  return run_shots(compile(circuit_for(e, role), &noise_), shots, seed);
}

Counts ReplayBackend::execute(const BatchEntry& e, CircuitRole role, std::uint64_t, std::uint64_t) const {
  const auto it = counts_.find({e.i, e.j, role});
  if (it == counts_.end())
    throw Error(ErrorCode::MissingData, "no recorded counts for (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ", " +
                                            std::string(to_string(role)) + ")");
  return it->second;
}

std::string counts_to_csv(const CountsTable& counts) {
  std::string out = "i,j,bitstring,count,role\n";
  for (const auto& [key, hist] : counts) {
    const auto& [i, j, role] = key;
    for (const auto& [bits, n] : hist)
      out += csv::join({std::to_string(i), std::to_string(j), bits, std::to_string(n), std::string(to_string(role))}) + "\n";
  }
  return out;
}

CountsTable parse_counts_csv(std::string_view text) {
  const auto rows = csv::lines(text);
  if (rows.empty()) throw Error(ErrorCode::ParseError, "counts file is empty");
  const auto header = csv::split_record(rows[0]);
  const bool with_role = header.size() == 5;
  if (!(header == std::vector<std::string>{"i", "j", "bitstring", "count"} ||
        header == std::vector<std::string>{"i", "j", "bitstring", "count", "role"}))
    throw Error(ErrorCode::ParseError, "counts line 1: expected header i,j,bitstring,count[,role]");
  CountsTable out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const auto ctx = "counts line " + std::to_string(r + 1);
    const auto f = csv::split_record(rows[r]);
    if (f.size() != header.size()) throw Error(ErrorCode::ParseError, ctx + ": expected " + std::to_string(header.size()) + " fields");
    const auto i = static_cast<int>(csv::parse_int(f[0], ctx));
    const auto j = static_cast<int>(csv::parse_int(f[1], ctx));
    if (f[2].empty() || f[2].find_first_not_of("01") != std::string::npos)
      throw Error(ErrorCode::ParseError, ctx + ": bit string must be 0/1 characters");
    const auto n = csv::parse_int(f[3], ctx);
    if (n < 0) throw Error(ErrorCode::ParseError, ctx + ": negative count");
    CircuitRole role = CircuitRole::Main;
    try {
      role = with_role ? circuit_role_from_string(f[4]) : CircuitRole::Main;
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, ctx + ": " + e.what());
    }
    auto& hist = out[{i, j, role}];
    if (!hist.empty() && hist.begin()->first.size() != f[2].size())
      throw Error(ErrorCode::ParseError, ctx + ": bit strings of one circuit differ in length");
    hist[f[2]] += static_cast<std::uint64_t>(n);
  }
  return out;
}

std::string results_to_csv(const std::vector<ResultEntry>& results) {
  std::string out = "i,j,kind,estimate,shots,stderr,error\n";
  for (const auto& r : results) {
    const auto& c = r.record;
    out += csv::join({std::to_string(c.i), std::to_string(c.j), std::string(to_string(c.kind)),
                      r.ok() ? csv::format_double(c.estimate) : "", r.ok() ? std::to_string(c.shots) : "",
                      r.ok() && c.std_error ? csv::format_double(*c.std_error) : "", r.error}) +
           "\n";
  }
  return out;
}

std::vector<ResultEntry> parse_results_csv(std::string_view text) {
  const auto rows = csv::lines(text);
  if (rows.empty()) throw Error(ErrorCode::ParseError, "results file is empty");
  const auto header = csv::split_record(rows[0]);
  const std::vector<std::string> base{"i", "j", "kind", "estimate", "shots", "stderr"};
  auto with_error = base;
  with_error.push_back("error");
  if (header != base && header != with_error)
    throw Error(ErrorCode::ParseError, "results line 1: expected header i,j,kind,estimate,shots,stderr[,error]");
  std::vector<ResultEntry> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const auto ctx = "results line " + std::to_string(r + 1);
    const auto f = csv::split_record(rows[r]);
    if (f.size() != header.size()) throw Error(ErrorCode::ParseError, ctx + ": expected " + std::to_string(header.size()) + " fields");
    ResultEntry e;
    e.record.i = static_cast<int>(csv::parse_int(f[0], ctx));
    e.record.j = static_cast<int>(csv::parse_int(f[1], ctx));
    try {
      e.record.kind = estimator_from_string(f[2]);
    } catch (const Error& err) {
      throw Error(ErrorCode::ParseError, ctx + ": " + err.what());
    }
    if (header.size() == 7) e.error = f[6];
    if (e.ok()) {
      e.record.estimate = csv::parse_double(f[3], ctx);
      const auto shots = csv::parse_int(f[4], ctx);
      if (shots < 1) throw Error(ErrorCode::ParseError, ctx + ": shots must be positive");
      e.record.shots = static_cast<std::uint64_t>(shots);
      if (!f[5].empty()) e.record.std_error = csv::parse_double(f[5], ctx);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CapabilityRecord> records_of(const std::vector<ResultEntry>& results) {
  std::vector<CapabilityRecord> out;
  for (const auto& r : results)
    if (r.ok()) out.push_back(r.record);
  return out;
}

RunOutput execute_batch(const CircuitBatch& batch, const Backend& backend, const RunConfig& cfg) {
  if (cfg.shots < 1) throw Error(ErrorCode::InvalidArgument, "need at least one shot");
  const bool srdfe = batch.estimator == EstimatorKind::Srdfe;
  const std::size_t n = batch.entries.size();
  std::vector<Counts> main(n), null(n);
  std::vector<ResultEntry> results(n);
  std::vector<double> p3(n), null_p3(n);
  std::vector<std::exception_ptr> errors(n);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(n); ++idx) {
    const auto u = static_cast<std::size_t>(idx);
    const auto& e = batch.entries[u];
    auto& r = results[u];
    r.record.i = e.i;
    r.record.j = e.j;
    r.record.kind = batch.estimator;
    if (!e.ok()) {
      r.error = e.error;
      continue;
    }
    try {
      const auto iu = static_cast<std::uint64_t>(e.i), ju = static_cast<std::uint64_t>(e.j);
      main[u] = backend.execute(e, CircuitRole::Main, cfg.shots,
                                derive_seed(batch.seed, {kTagExecute, iu, ju, role_tag(CircuitRole::Main)}));
      const auto shots = total_shots(main[u]);
      r.record.shots = shots;
      if (!srdfe) {
        r.record.estimate = estimate_success_probability(main[u], *e.target, shots);
      } else {
        null[u] = backend.execute(e, CircuitRole::Null, cfg.shots,
                                  derive_seed(batch.seed, {kTagExecute, iu, ju, role_tag(CircuitRole::Null)}));
        p3[u] = estimate_p3_expectation(main[u], *e.p3, shots);
        null_p3[u] = estimate_p3_expectation(null[u], *e.null_p3, total_shots(null[u]));
      }
    } catch (const Error& err) {
      if (err.code() == ErrorCode::MissingData || err.code() == ErrorCode::InvalidArgument)
        r.error = err.what();
      else
        errors[u] = std::current_exception();
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  if (srdfe) {
    // Pool the references of each vector over its successful circuits.
    std::map<int, std::vector<std::size_t>> by_vector;
    for (std::size_t u = 0; u < n; ++u)
      if (results[u].ok()) by_vector[batch.entries[u].i].push_back(u);
    for (const auto& [i, members] : by_vector) {
      std::vector<double> a, b;
      for (auto u : members) {
        a.push_back(p3[u]);
        b.push_back(null_p3[u]);
      }
      try {
        Rng rng = make_rng(batch.seed, {kTagBootstrap, static_cast<std::uint64_t>(i)});
        const auto est = srdfe_vector_estimates(a, b, batch.entries[members[0]].width(), cfg.bootstrap, rng);
        for (std::size_t t = 0; t < members.size(); ++t) {
          results[members[t]].record.estimate = est.per_circuit[t];
          results[members[t]].record.std_error = est.std_error;
        }
      } catch (const Error& err) {
        if (err.code() != ErrorCode::DegenerateReference) throw;
        for (auto u : members) results[u].error = err.what();
      }
    }
  }

  RunOutput out;
  for (std::size_t u = 0; u < n; ++u) {
    const auto& e = batch.entries[u];
    if (!main[u].empty()) out.counts[{e.i, e.j, CircuitRole::Main}] = std::move(main[u]);
    if (!null[u].empty()) out.counts[{e.i, e.j, CircuitRole::Null}] = std::move(null[u]);
    if (!results[u].ok()) ++out.errors;
  }
  out.results = std::move(results);
  return out;
}

void update_manifest(const std::string& manifest_path, const std::string& artifact, const std::string& path,
                     const std::map<std::string, std::string>& metadata) {
  json doc = json::object();
  if (std::filesystem::exists(manifest_path)) {
    try {
      doc = json::parse(csv::read_file(manifest_path));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, "manifest " + manifest_path + ": " + e.what());
    }
  }
  const auto now = utc_now();
  if (!doc.contains("created")) doc["created"] = now;
  doc["updated"] = now;
  doc["artifacts"][artifact] = {{"path", path}, {"written", now}};
  for (const auto& [k, v] : metadata) doc["metadata"][k] = v;
  csv::write_file(manifest_path, doc.dump(1) + "\n");
}

}  // namespace fmb
