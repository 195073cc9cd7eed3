#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "crowdlens/expression.hpp"
#include "crowdlens/geometric_features.hpp"

namespace crowdlens {

struct SocialScores {
  double socialization = 0.0;
  double isolation = 1.0;

  /// Isolation is the complement of socialization.
  static SocialScores from_socialization(double socialization) {
    return {socialization, 1.0 - socialization};
  }
};

/// Monotone logistic stand-in for the trained socialization network.
struct SocialSurrogateParams {
  double weight_collectivity = 2.0;
  double weight_proximity = 2.0;
  double weight_neighbors = 2.0;
  double bias = -3.0;
  double d_max = kAloneMeanDistance;
  int n_cap = 10;

  void validate() const;
};

SocialScores socialization_level(double phi, double mean_dist, double neighbors, const SocialSurrogateParams& p);

enum class Factor { O, C, E, A, N };
inline constexpr std::array<Factor, 5> kFactors = {Factor::O, Factor::C, Factor::E, Factor::A, Factor::N};

std::string_view to_string(Factor f);
std::optional<Factor> parse_factor(std::string_view text);

struct ItemEquation {
  int item_id = 0;
  Factor factor = Factor::O;
  std::string description;
  Expression evaluator;
};

double evaluate_item(const ItemEquation& eq, const FeatureVector& v);

/// One surrogate item per factor: O = alpha, C = s + 1/alpha,
/// E = socialization, A = collectivity, N = (isolation + 1 - collectivity) / 2.
std::vector<ItemEquation> default_registry();

/// JSON list of {item_id, factor, expression[, description]}.
std::vector<ItemEquation> parse_registry(std::string_view json_text);
std::vector<ItemEquation> load_registry(const std::filesystem::path& path);
std::string registry_to_json(std::span<const ItemEquation> registry);

struct OceanScores {
  double O = 0.5;
  double C = 0.5;
  double E = 0.5;
  double A = 0.5;
  double N = 0.5;

  double operator[](Factor f) const;
  double& operator[](Factor f);
};

/// Per-item min-max normalization across the scene's pedestrians (constant
/// columns map to 0.5), then per-factor mean of the normalized items.
std::vector<OceanScores> ocean_from_items(std::span<const FeatureVector> all_vectors,
                                          std::span<const ItemEquation> registry);

enum class Polarity { Positive, Negative };
enum class Emotion { Fear, Happiness, Sadness, Anger };
inline constexpr std::array<Emotion, 4> kEmotions = {Emotion::Fear, Emotion::Happiness, Emotion::Sadness,
                                                     Emotion::Anger};

std::string_view to_string(Emotion e);

/// Values >= 0.5 are positive.
inline Polarity polarity(double v) { return v >= 0.5 ? Polarity::Positive : Polarity::Negative; }

/// Signed influence of each factor polarity on each OCC emotion.
class EmotionMappingTable {
 public:
  using Matrix = Eigen::Matrix<int, 10, 4>;

  /// Rows O+, O-, C+, C-, E+, E-, A+, A-, N+, N-; columns Fear, Happiness, Sadness, Anger.
  explicit EmotionMappingTable(const Matrix& entries) : entries_(entries) {}
  static const EmotionMappingTable& standard();

  int operator()(Factor f, Polarity p, Emotion e) const;
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

int emotion_contribution(const EmotionMappingTable& table, Factor factor, Polarity polarity, Emotion emotion);

struct EmotionScores {
  double fear = 0.5;
  double happiness = 0.5;
  double sadness = 0.5;
  double anger = 0.5;

  double operator[](Emotion e) const;
  /// Strongest emotion; ties resolve in Fear, Happiness, Sadness, Anger order.
  Emotion dominant() const;
};

/// score(E) = clamp(0.5 + sum_f table[f, polarity(v_f), E] * 2|v_f - 0.5| / 10, 0, 1).
EmotionScores emotions_from_ocean(const OceanScores& o, const EmotionMappingTable& table);

enum class Trait { O, C, E, A, N, Fear, Happiness, Sadness, Anger, Socialization };

std::string_view to_string(Trait t);
std::optional<Trait> parse_trait(std::string_view text);

/// Everything a pairwise comparison needs about one pedestrian.
struct TraitProfile {
  OceanScores ocean;
  EmotionScores emotions;
  SocialScores social;

  /// Throws TraitUnavailable if the score is not finite.
  double score(Trait t) const;
};

enum class Comparison { A, B, Both, Neither, Tie };
std::string_view to_string(Comparison c);

struct ComparisonBands {
  double tie_threshold = 0.05;
  double both_min = 0.75;
  double neither_max = 0.25;
};

Comparison compare_pedestrians(const TraitProfile& a, const TraitProfile& b, Trait trait,
                               const ComparisonBands& bands = {});

}  // namespace crowdlens
