#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fmb {

using Qubit = int;

/// A single-qubit Clifford C0..C23 or a CX(control, target).
struct Gate {
  enum class Kind : std::uint8_t { Clifford, CX };

  Kind kind = Kind::Clifford;
  int clifford = 0;
  std::array<Qubit, 2> qubits{0, 0};

  static Gate single(int clifford, Qubit q) { return {Kind::Clifford, clifford, {q, q}}; }
  static Gate cx(Qubit control, Qubit target) { return {Kind::CX, 0, {control, target}}; }

  bool is_two_qubit() const { return kind == Kind::CX; }
  bool is_identity() const { return kind == Kind::Clifford && clifford == 0; }
  int arity() const { return is_two_qubit() ? 2 : 1; }

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Gates acting on pairwise disjoint qubits.
class Layer {
 public:
  Layer() = default;
  /// Throws ParseError/InvalidArgument when two gates share a qubit.
  explicit Layer(std::vector<Gate> gates);

  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t two_qubit_count() const;
  /// True when every qubit of `qubits` is acted on by exactly one gate and no
  /// gate touches a qubit outside `qubits`.
  bool covers_exactly(std::span<const Qubit> qubits) const;

  friend bool operator==(const Layer&, const Layer&) = default;

 private:
  std::vector<Gate> gates_;
};

/// Ordered layers over an ordered qubit list. Idle qubits carry explicit C0.
class Circuit {
 public:
  Circuit() = default;
  Circuit(std::vector<Qubit> qubits, std::vector<Layer> layers);

  const std::vector<Qubit>& qubits() const { return qubits_; }
  const std::vector<Layer>& layers() const { return layers_; }
  int width() const { return static_cast<int>(qubits_.size()); }
  int depth() const { return static_cast<int>(layers_.size()); }
  /// Position of qubit label `q` in the qubit list, or -1.
  int position(Qubit q) const;

  /// Concatenation; both circuits must share the same qubit list.
  Circuit then(const Circuit& next) const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  std::vector<Qubit> qubits_;
  std::vector<Layer> layers_;
};

/// Text form: a `Q:` header naming the qubits, then one `L<k>:` line per layer
/// with `;`-separated gates (`C<i> q` or `CX c t`).
std::string serialize(const Circuit& c);
Circuit parse_circuit(std::string_view text);

/// Replaces every gate by its inverse (CX is self-inverse).
Layer invert_layer(const Layer& layer);

class ConnectivityGraph {
 public:
  ConnectivityGraph() = default;
  ConnectivityGraph(std::vector<Qubit> vertices, std::vector<std::pair<Qubit, Qubit>> edges);

  static ConnectivityGraph line(int n);
  static ConnectivityGraph all_to_all(int n);

  const std::vector<Qubit>& vertices() const { return vertices_; }
  const std::set<std::pair<Qubit, Qubit>>& edges() const { return edges_; }
  bool has_vertex(Qubit q) const;
  bool has_edge(Qubit a, Qubit b) const;
  /// Edges with both endpoints in `subset`, in sorted order.
  std::vector<std::pair<Qubit, Qubit>> induced_edges(std::span<const Qubit> subset) const;

 private:
  std::vector<Qubit> vertices_;
  std::set<std::pair<Qubit, Qubit>> edges_;
};

struct FeatureValues {
  int w = 0;
  int d = 0;
  int n2q = 0;
  double xi2q = 0.0;
  int n1q = 0;
  double xi1q = 0.0;
  std::vector<bool> active;  // A_q, indexed like the system qubit list

  friend bool operator==(const FeatureValues&, const FeatureValues&) = default;
};

/// Width, depth, gate counts and densities of `c`. `depth_override` replaces
/// the layer count in the density denominators (e.g. mirror benchmark depth).
FeatureValues compute_features(const Circuit& c, std::span<const Qubit> system_qubits,
                               std::optional<int> depth_override = std::nullopt);

}  // namespace fmb
