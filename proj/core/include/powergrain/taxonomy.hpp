#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace powergrain {

/// Instruction taxonomy: two types (scalar/vector) crossed with the
/// arithmetic/memory/logic families, plus conditional branches,
/// unconditional jumps, and a diagnostic Other bucket. The first eight
/// values are the model buckets; Other never becomes a model column.
enum class InstructionBucket : std::uint8_t {
  ScalarArithmetic = 0,
  ScalarMemory = 1,
  ScalarLogic = 2,
  VectorArithmetic = 3,
  VectorMemory = 4,
  VectorLogic = 5,
  Branch = 6,
  Jump = 7,
  Other = 8,
};

inline constexpr std::size_t kModelBucketCount = 8;

/// Model buckets in canonical column order (sa, sm, sl, va, vm, vl, br, jm).
constexpr std::array<InstructionBucket, kModelBucketCount> model_buckets() {
  return {InstructionBucket::ScalarArithmetic, InstructionBucket::ScalarMemory,
          InstructionBucket::ScalarLogic,      InstructionBucket::VectorArithmetic,
          InstructionBucket::VectorMemory,     InstructionBucket::VectorLogic,
          InstructionBucket::Branch,           InstructionBucket::Jump};
}

std::string_view bucket_name(InstructionBucket b);  // "VectorArithmetic"
std::string_view bucket_key(InstructionBucket b);   // "va"

/// Accepts the short key ("va") or the full name, case-insensitively.
std::optional<InstructionBucket> bucket_from_string(std::string_view s);

/// Probability distribution over the eight model buckets. Other weight is
/// renormalized out but reported as other_fraction for diagnostics.
struct InstructionHistogram {
  std::array<double, kModelBucketCount> p{};
  double other_fraction = 0.0;

  double& operator[](InstructionBucket b) { return p[static_cast<std::size_t>(b)]; }
  double operator[](InstructionBucket b) const { return p[static_cast<std::size_t>(b)]; }

  /// Entries in [0,1] and summing to 1 within tol.
  bool valid(double tol = 1e-9) const;

  static InstructionHistogram one_hot(InstructionBucket b);
  static InstructionHistogram uniform();
};

/// One sampled mnemonic with its sample share (perf annotate percent or a
/// raw count).
struct WeightedMnemonic {
  std::string mnemonic;
  double weight = 0.0;
};

enum class RuleKind { Exact, Prefix };

struct ClassifierRule {
  RuleKind kind;
  std::string pattern;
  InstructionBucket bucket;
};

/// Layered mnemonic classifier. Lookup order: exact match on the canonical
/// token, exact match with one trailing AT&T size suffix (b/w/l/q) stripped,
/// then longest matching prefix rule. Unknown tokens map to Other.
class RuleTable {
 public:
  RuleTable() = default;
  explicit RuleTable(std::span<const ClassifierRule> rules);

  /// The built-in rule corpus (see builtin_rules_text()).
  static const RuleTable& builtin();

  /// Parses the tab-separated rule format: `kind<TAB>pattern<TAB>bucket`,
  /// `#` comments, later lines overriding earlier ones.
  static RuleTable parse(std::string_view text, std::string_view source_name = "<rules>");
  static RuleTable load(const std::filesystem::path& file);

  InstructionBucket classify(std::string_view mnemonic) const;

  std::size_t rule_count() const noexcept { return exact_.size() + prefix_.size(); }

 private:
  void add(const ClassifierRule& rule);

  std::unordered_map<std::string, InstructionBucket> exact_;
  // Sorted by descending pattern length so the first match is the longest.
  std::vector<std::pair<std::string, InstructionBucket>> prefix_;
};

/// The built-in corpus in the rule-file format (versioned in its header).
std::string_view builtin_rules_text();

/// Lowercases, skips x86 prefix tokens (lock, rep, ...), returns the first
/// instruction token with operands stripped. Empty result means the text
/// held no instruction token.
std::string canonical_mnemonic(std::string_view raw);

/// Classification with the built-in table. Total and deterministic.
InstructionBucket classify_mnemonic(std::string_view mnemonic);

/// Aggregates weighted samples into a normalized model histogram.
/// Throws EmptyHistogram when no weight lands in a model bucket and
/// DomainError on negative weights.
InstructionHistogram build_histogram(std::span<const WeightedMnemonic> samples,
                                     const RuleTable& table = RuleTable::builtin());

}  // namespace powergrain
