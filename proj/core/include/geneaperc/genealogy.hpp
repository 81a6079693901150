#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geneaperc {

using VertexId = std::uint32_t;
using EdgeIndex = std::uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

/// Ulam-Harris label: the finite sequence of child ranks leading from the
/// root to a vertex. The empty sequence is the root.
///
/// Ordering is lexicographic with prefixes first, which is exactly the
/// depth-first order in which Tree stores its vertices.
class Label {
 public:
  Label() = default;
  explicit Label(std::vector<std::uint32_t> path);

  /// Accepts "∅" or "" for the root, a digit string such as "112" when every
  /// rank is below ten, or a dot-led list such as ".1.12" otherwise.
  static Label parse(std::string_view text);

  std::size_t length() const noexcept { return path_.size(); }
  bool is_root() const noexcept { return path_.empty(); }
  std::span<const std::uint32_t> path() const noexcept { return path_; }

  Label child(std::uint32_t rank) const;
  Label parent() const;

  /// Strict ancestor relation: `*this` is a proper prefix of `other`.
  bool is_ancestor_of(const Label& other) const noexcept;

  /// Suffix after removing the prefix `ancestor` (which must be a prefix).
  Label relative_to(const Label& ancestor) const;

  std::string to_string() const;

  friend auto operator<=>(const Label&, const Label&) = default;
  friend bool operator==(const Label&, const Label&) = default;

 private:
  std::vector<std::uint32_t> path_;
};

std::ostream& operator<<(std::ostream& os, const Label& label);

/// Immutable rooted ordered tree stored as an index arena.
///
/// Vertices are numbered in depth-first (lexicographic) order, so the root is
/// vertex 0, every parent precedes its children, and the descendants of v
/// occupy the contiguous range [v, v + subtree_size(v)). Edges are named by
/// their child endpoint: edge e joins vertex e + 1 to its parent.
class Tree {
 public:
  /// Single root vertex.
  Tree();

  /// Child counts listed in depth-first order. Throws Errc::invalid_argument
  /// if the sequence does not describe exactly one finite tree.
  static Tree from_preorder_counts(std::vector<std::uint32_t> counts);

  /// Child counts listed generation by generation. When `bfs_to_preorder` is
  /// given it receives, for each breadth-first position, the vertex id in the
  /// resulting tree.
  static Tree from_breadth_first_counts(std::span<const std::uint32_t> counts,
                                        std::vector<VertexId>* bfs_to_preorder = nullptr);

  std::size_t size() const noexcept { return counts_.size(); }
  std::size_t edge_count() const noexcept { return counts_.size() - 1; }
  static constexpr VertexId root() noexcept { return 0; }

  std::uint32_t child_count(VertexId v) const { return counts_[v]; }
  std::span<const VertexId> children(VertexId v) const {
    return {child_list_.data() + child_offset_[v], counts_[v]};
  }
  VertexId parent(VertexId v) const { return parent_[v]; }
  std::uint32_t depth(VertexId v) const { return depth_[v]; }
  /// Rank i of v among its siblings, so that label(v) = label(parent) i.
  std::uint32_t child_rank(VertexId v) const { return rank_[v]; }
  std::uint32_t subtree_size(VertexId v) const { return subtree_size_[v]; }
  std::uint32_t height() const noexcept { return height_; }

  Label label(VertexId v) const;
  std::optional<VertexId> find(const Label& label) const;
  /// Like find(), but throws Errc::vertex_not_found.
  VertexId at(const Label& label) const;

  std::span<const std::uint32_t> preorder_counts() const noexcept { return counts_; }

  /// FNV-1a over the depth-first child counts.
  std::uint64_t hash() const noexcept;

  friend bool operator==(const Tree& a, const Tree& b) { return a.counts_ == b.counts_; }

 private:
  explicit Tree(std::vector<std::uint32_t> counts);

  std::vector<std::uint32_t> counts_;
  std::vector<VertexId> parent_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint32_t> subtree_size_;
  std::vector<std::uint32_t> child_offset_;
  std::vector<VertexId> child_list_;
  std::uint32_t height_ = 0;
};

inline constexpr EdgeIndex edge_of(VertexId child) noexcept { return child - 1; }
inline constexpr VertexId child_of(EdgeIndex edge) noexcept { return edge + 1; }

using TreeListing = std::vector<std::pair<Label, std::uint32_t>>;

/// Validates a (label, child count) listing against the three Ulam-Harris
/// conditions and builds the tree. Listing order does not matter.
Tree build_tree(const TreeListing& listing);

/// Depth-first (label, child count) listing; build_tree(export_listing(t)) == t.
TreeListing export_listing(const Tree& tree);

/// The tree of u and its descendants, relabeled so that u becomes the root.
Tree subtree(const Tree& tree, const Label& u);

/// Strict ancestors of u, root first.
std::vector<Label> ancestors(const Tree& tree, const Label& u);

/// "label<TAB>childCount" lines in depth-first order.
void write_listing(const Tree& tree, std::ostream& os);
Tree read_listing(std::istream& is);

/// One node per vertex labeled with its Ulam-Harris string. The optional
/// callback returns extra DOT attributes for a vertex (e.g. `color="red"`).
std::string to_dot(const Tree& tree,
                   const std::function<std::string(VertexId)>& node_attributes = {},
                   const std::function<std::string(EdgeIndex)>& edge_attributes = {});

Tree complete_tree(std::uint32_t arity, std::uint32_t depth);
Tree star_tree(std::uint32_t leaves);
Tree path_tree(std::uint32_t length);

}  // namespace geneaperc
