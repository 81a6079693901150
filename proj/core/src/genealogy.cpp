#include "geneaperc/genealogy.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "geneaperc/error.hpp"

namespace geneaperc {

namespace {

constexpr std::string_view kRootGlyph = "\xE2\x88\x85";  // U+2205

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint32_t parse_rank(std::string_view token, std::string_view whole) {
  std::uint32_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || value == 0) {
    throw Error(Errc::parse_error, "bad Ulam-Harris label '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// Label

Label::Label(std::vector<std::uint32_t> path) : path_(std::move(path)) {
  for (std::uint32_t rank : path_) {
    if (rank == 0) throw Error(Errc::invalid_argument, "label ranks start at 1");
  }
}

Label Label::parse(std::string_view text) {
  text = trim(text);
  if (text.empty() || text == kRootGlyph) return Label{};
  std::vector<std::uint32_t> path;
  if (text.front() == '.') {
    std::string_view rest = text.substr(1);
    while (true) {
      const auto dot = rest.find('.');
      path.push_back(parse_rank(rest.substr(0, dot), text));
      if (dot == std::string_view::npos) break;
      rest.remove_prefix(dot + 1);
    }
  } else {
    for (char c : text) {
      if (c < '1' || c > '9') {
        throw Error(Errc::parse_error, "bad Ulam-Harris label '" + std::string(text) + "'");
      }
      path.push_back(static_cast<std::uint32_t>(c - '0'));
    }
  }
  return Label(std::move(path));
}

Label Label::child(std::uint32_t rank) const {
  auto path = path_;
  path.push_back(rank);
  return Label(std::move(path));
}

Label Label::parent() const {
  if (path_.empty()) throw Error(Errc::invalid_argument, "the root has no parent");
  return Label(std::vector<std::uint32_t>(path_.begin(), path_.end() - 1));
}

bool Label::is_ancestor_of(const Label& other) const noexcept {
  return path_.size() < other.path_.size() &&
         std::equal(path_.begin(), path_.end(), other.path_.begin());
}

Label Label::relative_to(const Label& ancestor) const {
  if (!(ancestor == *this) && !ancestor.is_ancestor_of(*this)) {
    throw Error(Errc::invalid_argument, ancestor.to_string() + " is not a prefix of " + to_string());
  }
  return Label(std::vector<std::uint32_t>(path_.begin() + static_cast<std::ptrdiff_t>(ancestor.length()),
                                          path_.end()));
}

std::string Label::to_string() const {
  if (path_.empty()) return std::string(kRootGlyph);
  const bool short_ranks =
      std::all_of(path_.begin(), path_.end(), [](std::uint32_t r) { return r <= 9; });
  std::string out;
  for (std::uint32_t rank : path_) {
    if (!short_ranks) out.push_back('.');
    out += std::to_string(rank);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Label& label) { return os << label.to_string(); }

// ---------------------------------------------------------------------------
// Tree

Tree::Tree() : Tree(std::vector<std::uint32_t>{0}) {}

Tree::Tree(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {
  const std::size_t n = counts_.size();
  parent_.assign(n, kNoVertex);
  depth_.assign(n, 0);
  rank_.assign(n, 0);
  subtree_size_.assign(n, 1);

  // Stack of (vertex, children still to attach).
  std::vector<std::pair<VertexId, std::uint32_t>> open;
  open.reserve(64);
  open.emplace_back(0, counts_[0]);
  for (VertexId v = 1; v < n; ++v) {
    while (open.back().second == 0) open.pop_back();
    auto& top = open.back();
    const VertexId p = top.first;
    parent_[v] = p;
    depth_[v] = depth_[p] + 1;
    rank_[v] = counts_[p] - top.second + 1;
    --top.second;
    height_ = std::max(height_, depth_[v]);
    open.emplace_back(v, counts_[v]);
  }

  for (VertexId v = static_cast<VertexId>(n); v-- > 1;) subtree_size_[parent_[v]] += subtree_size_[v];

  child_offset_.assign(n, 0);
  std::uint32_t offset = 0;
  for (VertexId v = 0; v < n; ++v) {
    child_offset_[v] = offset;
    offset += counts_[v];
  }
  child_list_.assign(offset, kNoVertex);
  for (VertexId v = 1; v < n; ++v) {
    child_list_[child_offset_[parent_[v]] + rank_[v] - 1] = v;
  }
}

Tree Tree::from_preorder_counts(std::vector<std::uint32_t> counts) {
  if (counts.empty()) throw Error(Errc::invalid_argument, "a tree has at least its root");
  // Lukasiewicz walk: pending child slots must stay positive until the last vertex.
  std::uint64_t pending = 1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (pending == 0) {
      throw Error(Errc::invalid_argument, "child counts describe more than one tree");
    }
    pending = pending - 1 + counts[i];
  }
  if (pending != 0) {
    throw Error(Errc::invalid_argument, "child counts leave " + std::to_string(pending) +
                                            " declared children unlisted");
  }
  if (counts.size() > std::numeric_limits<VertexId>::max() / 2) {
    throw Error(Errc::too_large, "tree exceeds the vertex index range");
  }
  return Tree(std::move(counts));
}

Tree Tree::from_breadth_first_counts(std::span<const std::uint32_t> counts,
                                     std::vector<VertexId>* bfs_to_preorder) {
  const std::size_t n = counts.size();
  if (n == 0) throw Error(Errc::invalid_argument, "a tree has at least its root");
  std::vector<std::uint64_t> first_child(n);
  std::uint64_t next = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= next) throw Error(Errc::invalid_argument, "breadth-first counts are disconnected");
    first_child[i] = next;
    next += counts[i];
  }
  if (next != n) throw Error(Errc::invalid_argument, "breadth-first counts do not close the tree");

  std::vector<std::uint32_t> pre;
  pre.reserve(n);
  if (bfs_to_preorder) bfs_to_preorder->assign(n, kNoVertex);
  std::vector<std::uint64_t> stack{0};
  while (!stack.empty()) {
    const std::uint64_t b = stack.back();
    stack.pop_back();
    if (bfs_to_preorder) (*bfs_to_preorder)[b] = static_cast<VertexId>(pre.size());
    pre.push_back(counts[b]);
    for (std::uint64_t c = counts[b]; c-- > 0;) stack.push_back(first_child[b] + c);
  }
  return Tree(std::move(pre));
}

Label Tree::label(VertexId v) const {
  std::vector<std::uint32_t> path(depth_[v]);
  for (VertexId u = v; u != 0; u = parent_[u]) path[depth_[u] - 1] = rank_[u];
  return Label(std::move(path));
}

std::optional<VertexId> Tree::find(const Label& label) const {
  VertexId v = 0;
  for (std::uint32_t rank : label.path()) {
    if (rank > counts_[v]) return std::nullopt;
    v = children(v)[rank - 1];
  }
  return v;
}

VertexId Tree::at(const Label& label) const {
  auto v = find(label);
  if (!v) throw Error(Errc::vertex_not_found, "no vertex " + label.to_string());
  return *v;
}

std::uint64_t Tree::hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint32_t c : counts_) {
    for (int byte = 0; byte < 4; ++byte) {
      h ^= (c >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Free functions

Tree build_tree(const TreeListing& listing) {
  std::map<Label, std::uint32_t> declared;
  for (const auto& [label, count] : listing) {
    if (!declared.emplace(label, count).second) {
      throw Error(Errc::duplicate_vertex, "vertex " + label.to_string() + " listed twice");
    }
  }
  if (!declared.contains(Label{})) throw Error(Errc::missing_root, "the root is not listed");

  for (const auto& [label, count] : declared) {
    if (label.is_root()) continue;
    const Label mother = label.parent();
    auto it = declared.find(mother);
    if (it == declared.end()) {
      throw Error(Errc::ancestor_gap,
                  "vertex " + label.to_string() + " listed without its ancestor " + mother.to_string());
    }
    if (label.path().back() > it->second) {
      throw Error(Errc::child_gap, "vertex " + label.to_string() + " exceeds the child count " +
                                       std::to_string(it->second) + " of " + mother.to_string());
    }
  }
  for (const auto& [label, count] : declared) {
    for (std::uint32_t i = 1; i <= count; ++i) {
      if (!declared.contains(label.child(i))) {
        throw Error(Errc::child_gap, "vertex " + label.to_string() + " declares " +
                                         std::to_string(count) + " children but " +
                                         label.child(i).to_string() + " is missing");
      }
    }
  }

  // std::map iterates labels lexicographically, i.e. depth-first.
  std::vector<std::uint32_t> counts;
  counts.reserve(declared.size());
  for (const auto& entry : declared) counts.push_back(entry.second);
  return Tree::from_preorder_counts(std::move(counts));
}

TreeListing export_listing(const Tree& tree) {
  TreeListing out;
  out.reserve(tree.size());
  for (VertexId v = 0; v < tree.size(); ++v) out.emplace_back(tree.label(v), tree.child_count(v));
  return out;
}

Tree subtree(const Tree& tree, const Label& u) {
  const VertexId v = tree.at(u);
  const auto counts = tree.preorder_counts();
  return Tree::from_preorder_counts(
      std::vector<std::uint32_t>(counts.begin() + v, counts.begin() + v + tree.subtree_size(v)));
}

std::vector<Label> ancestors(const Tree& tree, const Label& u) {
  tree.at(u);
  std::vector<Label> out;
  out.reserve(u.length());
  const auto path = u.path();
  for (std::size_t len = 0; len < path.size(); ++len) {
    out.emplace_back(std::vector<std::uint32_t>(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(len)));
  }
  return out;
}

void write_listing(const Tree& tree, std::ostream& os) {
  // Labels are rebuilt incrementally instead of walking to the root each time.
  std::vector<std::uint32_t> path;
  for (VertexId v = 0; v < tree.size(); ++v) {
    path.resize(tree.depth(v));
    if (v != 0) path.back() = tree.child_rank(v);
    os << Label(path).to_string() << '\t' << tree.child_count(v) << '\n';
  }
}

Tree read_listing(std::istream& is) {
  TreeListing listing;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": expected label<TAB>childCount");
    }
    std::uint32_t count = 0;
    const std::string_view count_text = trim(view.substr(tab + 1));
    const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc{} || ptr != count_text.data() + count_text.size()) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": bad child count");
    }
    listing.emplace_back(Label::parse(view.substr(0, tab)), count);
  }
  return build_tree(listing);
}

std::string to_dot(const Tree& tree, const std::function<std::string(VertexId)>& node_attributes,
                   const std::function<std::string(EdgeIndex)>& edge_attributes) {
  std::ostringstream os;
  os << "digraph tree {\n";
  std::vector<std::uint32_t> path;
  for (VertexId v = 0; v < tree.size(); ++v) {
    path.resize(tree.depth(v));
    if (v != 0) path.back() = tree.child_rank(v);
    os << "  v" << v << " [label=\"" << Label(path).to_string() << "\"";
    if (node_attributes) {
      const std::string extra = node_attributes(v);
      if (!extra.empty()) os << ", " << extra;
    }
    os << "];\n";
  }
  for (VertexId v = 1; v < tree.size(); ++v) {
    os << "  v" << tree.parent(v) << " -> v" << v;
    if (edge_attributes) {
      const std::string extra = edge_attributes(edge_of(v));
      if (!extra.empty()) os << " [" << extra << "]";
    }
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

Tree complete_tree(std::uint32_t arity, std::uint32_t depth) {
  std::vector<std::uint32_t> bfs{arity};
  std::uint64_t level = 1;
  for (std::uint32_t g = 1; g <= depth; ++g) {
    level *= arity;
    if (bfs.size() + level > (1ULL << 30)) throw Error(Errc::too_large, "complete tree too large");
    bfs.insert(bfs.end(), level, g == depth ? 0 : arity);
  }
  if (depth == 0) bfs[0] = 0;
  return Tree::from_breadth_first_counts(bfs);
}

Tree star_tree(std::uint32_t leaves) {
  std::vector<std::uint32_t> counts(leaves + 1, 0);
  counts[0] = leaves;
  return Tree::from_preorder_counts(std::move(counts));
}

Tree path_tree(std::uint32_t length) {
  std::vector<std::uint32_t> counts(length + 1, 1);
  counts.back() = 0;
  return Tree::from_preorder_counts(std::move(counts));
}

}  // namespace geneaperc
