#include "dropf/network.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace dropf {

std::string node_kind_str(NodeKind k) {
  switch (k) {
    case NodeKind::Substation: return "substation";
    case NodeKind::MediumVoltage: return "medium-voltage";
    case NodeKind::Secondary: return "secondary";
    case NodeKind::ServicePoint: return "service-point";
  }
  return "?";
}

NodeKind parse_node_kind(const std::string& s) {
  if (s == "substation") return NodeKind::Substation;
  if (s == "medium-voltage") return NodeKind::MediumVoltage;
  if (s == "secondary") return NodeKind::Secondary;
  if (s == "service-point") return NodeKind::ServicePoint;
  throw std::invalid_argument("unknown node kind '" + s + "'");
}

const Node* NetworkModel::find_node(const std::string& id) const {
  for (const Node& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

Node* NetworkModel::find_node(const std::string& id) {
  for (Node& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

int NetworkModel::node_index(const std::string& id) const {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

double NetworkModel::v_base(const std::string& id) const {
  auto it = base.Vb_ln.find(id);
  if (it == base.Vb_ln.end())
    throw std::runtime_error("node '" + id + "' has no base voltage");
  return it->second;
}

double NetworkModel::z_base(const Node& n) const {
  double Vb = v_base(n.id);
  return is_secondary_side(n) ? PerUnitSystem::z_base_secondary(Vb, base.S_b)
                              : PerUnitSystem::z_base_primary(Vb, base.S_b);
}

double NetworkModel::i_base(const Node& n) const {
  double Vb = v_base(n.id);
  return is_secondary_side(n) ? PerUnitSystem::i_base_secondary(Vb, base.S_b)
                              : PerUnitSystem::i_base_primary(Vb, base.S_b);
}

std::vector<Diagnostic> validate_network(const NetworkModel& net) {
  std::vector<Diagnostic> out;
  auto flag = [&](std::string code, std::string subject, std::string msg) {
    out.push_back({std::move(code), std::move(subject), std::move(msg)});
  };

  std::set<std::string> seen;
  for (const Node& n : net.nodes) {
    if (!seen.insert(n.id).second) flag("duplicate-node", n.id, "node id repeated");
    if (n.phases.empty()) flag("empty-phases", n.id, "node has no phases");
    const int np = n.phases.size();
    if (static_cast<int>(n.vmin.size()) != np || static_cast<int>(n.vmax.size()) != np) {
      flag("limit-shape", n.id, "vmin/vmax not sized per phase");
    } else {
      for (int p = 0; p < np; ++p)
        if (!(0.0 < n.vmin[p] && n.vmin[p] < n.vmax[p]))
          flag("limit-order", n.id, "requires 0 < vmin < vmax");
    }
    if (net.base.Vb_ln.find(n.id) == net.base.Vb_ln.end())
      flag("missing-vbase", n.id, "no base line-neutral voltage");
  }
  if (net.base.S_b <= 0.0) flag("missing-sbase", "", "S_b not set");

  int roots = 0;
  for (const Node& n : net.nodes)
    if (n.kind == NodeKind::Substation) ++roots;
  if (roots != 1)
    flag("root-count", "", "expected exactly one substation node, found " + std::to_string(roots));

  // Branch-level checks and adjacency for the tree test.
  std::map<std::string, std::vector<std::string>> adj;
  for (const Branch& b : net.branches) {
    const Node* nf = net.find_node(b.from);
    const Node* nt = net.find_node(b.to);
    std::string bid = b.from + "-" + b.to;
    if (!nf || !nt) {
      flag("dangling-branch", bid, "endpoint node missing");
      continue;
    }
    if (b.phases.empty()) flag("empty-phases", bid, "branch has no phases");
    if (!b.phases.subset_of(nf->phases) || !b.phases.subset_of(nt->phases))
      flag("phase-mismatch", bid, "branch phases not a subset of both endpoints");
    const int np = b.phases.size();
    if (b.Z.rows() != np || b.Z.cols() != np) {
      flag("impedance-shape", bid, "Z not |phi| x |phi|");
    } else {
      if (!b.Z.isApprox(b.Z.transpose(), 1e-9)) flag("impedance-symmetry", bid, "Z not symmetric");
      for (int p = 0; p < np; ++p)
        if (b.Z(p, p).real() < 0.0) flag("impedance-sign", bid, "negative series resistance");
    }
    adj[b.from].push_back(b.to);
    adj[b.to].push_back(b.from);
  }
  // Unexpanded split-phase elements are tree edges too.
  size_t extra_edges = 0;
  for (const SplitPhaseTransformer& t : net.transformers) {
    if (net.find_node(t.primary_node) && net.find_node(t.secondary_node)) {
      adj[t.primary_node].push_back(t.secondary_node);
      adj[t.secondary_node].push_back(t.primary_node);
      ++extra_edges;
    }
  }
  for (const TriplexLine& t : net.triplex) {
    if (net.find_node(t.from) && net.find_node(t.to)) {
      adj[t.from].push_back(t.to);
      adj[t.to].push_back(t.from);
      ++extra_edges;
    }
  }

  // Radiality: connected and |E| = |V| - 1 with no cycle reachable from root.
  if (roots == 1) {
    std::string root;
    for (const Node& n : net.nodes)
      if (n.kind == NodeKind::Substation) root = n.id;
    std::map<std::string, std::string> parent;
    std::queue<std::string> q;
    q.push(root);
    parent[root] = root;
    bool cycle = false;
    while (!q.empty()) {
      std::string u = q.front();
      q.pop();
      for (const std::string& v : adj[u]) {
        if (v == parent[u] && parent.count(u)) continue;
        if (parent.count(v)) {
          cycle = true;
          continue;
        }
        parent[v] = u;
        q.push(v);
      }
    }
    if (cycle || net.branches.size() + extra_edges + 1 != net.nodes.size())
      flag("not-radial", "", "branch graph is not a tree rooted at the substation");
    for (const Node& n : net.nodes)
      if (!parent.count(n.id)) flag("disconnected", n.id, "unreachable from substation");

    // Every non-root node's phases must equal its incoming branch phases so
    // the voltage-drop equation determines the child voltage matrix fully.
    for (const Branch& b : net.branches) {
      const Node* nf = net.find_node(b.from);
      const Node* nt = net.find_node(b.to);
      if (!nf || !nt) continue;
      // Orient along the BFS tree.
      const Node* child = nullptr;
      if (parent.count(b.to) && parent.at(b.to) == b.from) child = nt;
      else if (parent.count(b.from) && parent.at(b.from) == b.to) child = nf;
      if (child && !(b.phases == child->phases))
        flag("phase-taper", b.from + "-" + b.to,
             "child node phases must equal incoming branch phases");
    }
  }

  for (const Load& l : net.loads) {
    const Node* n = net.find_node(l.node);
    if (!n) { flag("dangling-load", l.node, "load at unknown node"); continue; }
    if (!l.phases.subset_of(n->phases)) flag("phase-mismatch", l.node, "load phases not at node");
  }
  for (const Der& d : net.ders) {
    const Node* n = net.find_node(d.node);
    if (!n) { flag("dangling-der", d.node, "DER at unknown node"); continue; }
    if (!d.phases.subset_of(n->phases)) flag("phase-mismatch", d.node, "DER phases not at node");
    if (d.p_min != 0.0) flag("der-pmin", d.id, "DER p_min must be 0");
    if (d.s_rated > 0.0 && !(d.q_max >= 0.44 * d.s_rated - 1e-12 &&
                             d.q_min <= -0.44 * d.s_rated + 1e-12))
      flag("der-qrange", d.id, "q bounds must span at least +/-44% of s_rated");
    if (d.p_max > 0.0 && d.s_rated > 0.0 && d.p_min > d.s_rated)
      flag("der-box", d.id, "P/Q box does not meet the rating disk");
  }
  for (const SplitPhaseTransformer& t : net.transformers) {
    if (!net.find_node(t.primary_node)) flag("dangling-xfmr", t.id, "primary node missing");
    if (t.Vbp_ln <= t.Vbs_ln || t.Vbs_ln <= 0.0) flag("xfmr-ratio", t.id, "requires n_t = Vbp/Vbs > 1");
    double rel = std::abs(t.Z1 - t.Z2) / std::max(1e-300, std::abs(t.Z1));
    if (rel > 1e-12 && std::abs(t.Z1 - t.Z2) > 1e-15)
      flag("asymmetric-secondary", t.id, "Z1 != Z2 violates the balanced split-phase assumption");
  }
  for (const TriplexLine& t : net.triplex) {
    double rel = std::abs(t.Z1 - t.Z2) / std::max(1e-300, std::abs(t.Z1));
    if (rel > 1e-12 && std::abs(t.Z1 - t.Z2) > 1e-15)
      flag("asymmetric-secondary", t.from + "-" + t.to,
           "Z1 != Z2 violates the balanced split-phase assumption");
  }
  return out;
}

}  // namespace dropf
