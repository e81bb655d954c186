#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "fmb/circuit.hpp"
#include "fmb/design.hpp"
#include "fmb/estimators.hpp"
#include "fmb/frame_sim.hpp"
#include "fmb/noise.hpp"
#include "fmb/pauli.hpp"
#include "fmb/sampler.hpp"

namespace fmb {

enum class CircuitFamily { Mirror, FixedDensity };
std::string_view to_string(CircuitFamily f);
CircuitFamily circuit_family_from_string(std::string_view s);

/// Which circuit of a batch entry ran: the benchmark circuit or its SR-DFE
/// depth-0 reference.
enum class CircuitRole { Main, Null };
std::string_view to_string(CircuitRole r);
CircuitRole circuit_role_from_string(std::string_view s);

struct SamplingConfig {
  CircuitFamily family = CircuitFamily::Mirror;
  double default_xi = 0.25;  // used when the design has no "xi" axis
  ConnectivityGraph connectivity;
  QubitChoice qubits;
};

/// One sampled circuit. For success probability, `circuit` is the mirror
/// circuit and `target` its noiseless outcome. For SR-DFE, `circuit` is
/// prep + c + measure, `p3` its observable, and the null pair is filled.
struct BatchEntry {
  int i = 0, j = 0;
  Circuit circuit;
  std::optional<std::string> target;
  std::optional<PauliOperator> p3;
  std::optional<Circuit> null_circuit;
  std::optional<PauliOperator> null_p3;
  std::string error;  // non-empty when sampling failed

  bool ok() const { return error.empty(); }
  int width() const { return circuit.width(); }
};

struct CircuitBatch {
  std::string design;  // reference to the design file
  std::uint64_t seed = 0;
  CircuitFamily family = CircuitFamily::Mirror;
  EstimatorKind estimator = EstimatorKind::SuccessProbability;
  int k = 1;
  int m = 0;
  std::vector<BatchEntry> entries;  // (i, j) order
};

/// Samples K circuits per design vector. Circuit (i, j) draws from
/// derive_seed(seed, {sample, i, j}) and its SR-DFE bundle from
/// derive_seed(seed, {bundle, i, j}). Sampler failures (BadBenchmarkDepth,
/// DensityInfeasible, NoEdges) become entry errors; other failures throw.
CircuitBatch sample_batch(const DesignPlan& design, EstimatorKind estimator, const SamplingConfig& config, std::uint64_t seed,
                          std::string design_ref = {});

std::string batch_to_json(const CircuitBatch& batch);
CircuitBatch batch_from_json(std::string_view text);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual Counts execute(const BatchEntry& entry, CircuitRole role, std::uint64_t shots, std::uint64_t seed) const = 0;
};

class NoiselessBackend : public Backend {
 public:
  std::string id() const override { return "noiseless"; }
  Counts execute(const BatchEntry& entry, CircuitRole role, std::uint64_t shots, std::uint64_t seed) const override;
};

class NoisyBackend : public Backend {
 public:
  explicit NoisyBackend(NoiseModel noise) : noise_(std::move(noise)) {}
  std::string id() const override { return "noisy"; }
  Counts execute(const BatchEntry& entry, CircuitRole role, std::uint64_t shots, std::uint64_t seed) const override;
  const NoiseModel& noise() const { return noise_; }

 private:
  NoiseModel noise_;
};

using CountsKey = std::tuple<int, int, CircuitRole>;
using CountsTable = std::map<CountsKey, Counts>;

/// Serves previously recorded histograms; throws MissingData when a circuit
/// has none.
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(CountsTable counts) : counts_(std::move(counts)) {}
  std::string id() const override { return "replay"; }
  Counts execute(const BatchEntry& entry, CircuitRole role, std::uint64_t shots, std::uint64_t seed) const override;

 private:
  CountsTable counts_;
};

/// Rows i,j,bitstring,count,role; the role column may be omitted on input
/// (meaning main).
std::string counts_to_csv(const CountsTable& counts);
CountsTable parse_counts_csv(std::string_view text);

struct ResultEntry {
  CapabilityRecord record;
  std::string error;  // non-empty: no estimate for this (i, j)
  bool ok() const { return error.empty(); }
};

/// Rows i,j,kind,estimate,shots,stderr,error.
std::string results_to_csv(const std::vector<ResultEntry>& results);
std::vector<ResultEntry> parse_results_csv(std::string_view text);
/// The successful records.
std::vector<CapabilityRecord> records_of(const std::vector<ResultEntry>& results);

struct RunConfig {
  std::uint64_t shots = 1024;
  int bootstrap = 1000;
};

struct RunOutput {
  std::vector<ResultEntry> results;
  CountsTable counts;
  int errors = 0;
};

/// Executes every entry (OpenMP over entries). Execution of (i, j, role) uses
/// derive_seed(batch.seed, {execute, i, j, role}). SR-DFE estimates pool the
/// references of each vector and carry its paired-bootstrap stderr.
RunOutput execute_batch(const CircuitBatch& batch, const Backend& backend, const RunConfig& config);

/// Records `artifact` (e.g. "results") at `path` in the manifest JSON file,
/// creating it if needed, along with run metadata and UTC timestamps.
void update_manifest(const std::string& manifest_path, const std::string& artifact, const std::string& path,
                     const std::map<std::string, std::string>& metadata = {});

}  // namespace fmb
