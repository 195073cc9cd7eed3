#include "crowdlens/personality_emotion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "crowdlens/error.hpp"

namespace crowdlens {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

std::size_t factor_index(Factor f) { return static_cast<std::size_t>(f); }

}  // namespace

void SocialSurrogateParams::validate() const {
  if (!(d_max > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "social d_max must be > 0");
  }
  if (n_cap < 1) {
    throw Error(ErrorCode::InvalidParameter, "social n_cap must be >= 1");
  }
  for (const double w : {weight_collectivity, weight_proximity, weight_neighbors, bias}) {
    if (!std::isfinite(w)) {
      throw Error(ErrorCode::InvalidParameter, "social surrogate weights must be finite");
    }
  }
}

SocialScores socialization_level(double phi, double mean_dist, double neighbors, const SocialSurrogateParams& p) {
  const double collect = std::clamp(phi, 0.0, 1.0);
  const double proximity = 1.0 - std::clamp(mean_dist, 0.0, p.d_max) / p.d_max;
  const double crowding = std::clamp(neighbors, 0.0, static_cast<double>(p.n_cap)) / p.n_cap;
  const double z =
      p.weight_collectivity * collect + p.weight_proximity * proximity + p.weight_neighbors * crowding + p.bias;
  return SocialScores::from_socialization(1.0 / (1.0 + std::exp(-z)));
}

std::string_view to_string(Factor f) {
  static constexpr std::array<std::string_view, 5> names = {"O", "C", "E", "A", "N"};
  return names[factor_index(f)];
}

std::optional<Factor> parse_factor(std::string_view text) {
  const auto t = upper(text);
  if (t == "O" || t == "OPENNESS") return Factor::O;
  if (t == "C" || t == "CONSCIENTIOUSNESS") return Factor::C;
  if (t == "E" || t == "EXTRAVERSION" || t == "EXTROVERSION") return Factor::E;
  if (t == "A" || t == "AGREEABLENESS") return Factor::A;
  if (t == "N" || t == "NEUROTICISM") return Factor::N;
  return std::nullopt;
}

double evaluate_item(const ItemEquation& eq, const FeatureVector& v) { return eq.evaluator.evaluate(v); }

std::vector<ItemEquation> default_registry() {
  std::vector<ItemEquation> r;
  r.push_back({1, Factor::C, "Have clear goals, work to them in orderly way", Expression::parse("s + recip(alpha)")});
  r.push_back({101, Factor::O, "Changes direction while walking", Expression::parse("alpha")});
  r.push_back({102, Factor::E, "Engages with the people around", Expression::parse("socialization")});
  r.push_back({103, Factor::A, "Moves in accord with others", Expression::parse("collectivity")});
  r.push_back({104, Factor::N, "Remains isolated and few collective",
               Expression::parse("(isolation + (1 - collectivity)) / 2")});
  return r;
}

std::vector<ItemEquation> parse_registry(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::RegistryParse, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::RegistryParse, "registry must be a JSON list");
  }
  std::vector<ItemEquation> out;
  std::set<int> seen;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("item_id") || !item["item_id"].is_number_integer() ||
        !item.contains("factor") || !item["factor"].is_string() || !item.contains("expression") ||
        !item["expression"].is_string()) {
      throw Error(ErrorCode::RegistryParse, "each item needs integer item_id, string factor and expression");
    }
    const int id = item["item_id"].get<int>();
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::RegistryParse, "duplicate item_id " + std::to_string(id));
    }
    const auto factor = parse_factor(item["factor"].get<std::string>());
    if (!factor) {
      throw Error(ErrorCode::RegistryParse, "item " + std::to_string(id) + ": unknown factor");
    }
    std::string description = item.value("description", std::string());
    out.push_back({id, *factor, std::move(description), Expression::parse(item["expression"].get<std::string>())});
  }
  return out;
}

std::vector<ItemEquation> load_registry(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open registry " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_registry(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string registry_to_json(std::span<const ItemEquation> registry) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& eq : registry) {
    doc.push_back({{"item_id", eq.item_id},
                   {"factor", to_string(eq.factor)},
                   {"expression", eq.evaluator.source()},
                   {"description", eq.description}});
  }
  return doc.dump();
}

double OceanScores::operator[](Factor f) const {
  switch (f) {
    case Factor::O: return O;
    case Factor::C: return C;
    case Factor::E: return E;
    case Factor::A: return A;
    case Factor::N: return N;
  }
  return O;
}

double& OceanScores::operator[](Factor f) {
  switch (f) {
    case Factor::O: return O;
    case Factor::C: return C;
    case Factor::E: return E;
    case Factor::A: return A;
    case Factor::N: return N;
  }
  return O;
}

std::vector<OceanScores> ocean_from_items(std::span<const FeatureVector> all_vectors,
                                          std::span<const ItemEquation> registry) {
  std::array<int, 5> items_per_factor{};
  for (const auto& eq : registry) {
    ++items_per_factor[factor_index(eq.factor)];
  }
  for (const auto f : kFactors) {
    if (items_per_factor[factor_index(f)] == 0) {
      throw Error(ErrorCode::EmptyRegistryFactor, std::string(to_string(f)));
    }
  }
  const auto peds = static_cast<Eigen::Index>(all_vectors.size());
  const auto items = static_cast<Eigen::Index>(registry.size());
  if (peds == 0) {
    return {};
  }

  Eigen::MatrixXd raw(peds, items);
  for (Eigen::Index i = 0; i < peds; ++i) {
    for (Eigen::Index k = 0; k < items; ++k) {
      raw(i, k) = evaluate_item(registry[static_cast<std::size_t>(k)], all_vectors[static_cast<std::size_t>(i)]);
    }
  }

  Eigen::MatrixXd normalized(peds, items);
  for (Eigen::Index k = 0; k < items; ++k) {
    const double lo = raw.col(k).minCoeff();
    const double hi = raw.col(k).maxCoeff();
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    if (hi - lo <= 1e-12 * scale) {
      normalized.col(k).setConstant(0.5);
    } else {
      normalized.col(k) = (raw.col(k).array() - lo) / (hi - lo);
    }
  }

  std::vector<OceanScores> out(static_cast<std::size_t>(peds));
  for (Eigen::Index i = 0; i < peds; ++i) {
    std::array<double, 5> sum{};
    for (Eigen::Index k = 0; k < items; ++k) {
      sum[factor_index(registry[static_cast<std::size_t>(k)].factor)] += normalized(i, k);
    }
    auto& o = out[static_cast<std::size_t>(i)];
    for (const auto f : kFactors) {
      o[f] = sum[factor_index(f)] / items_per_factor[factor_index(f)];
    }
  }
  return out;
}

std::string_view to_string(Emotion e) {
  switch (e) {
    case Emotion::Fear: return "Fear";
    case Emotion::Happiness: return "Happiness";
    case Emotion::Sadness: return "Sadness";
    case Emotion::Anger: return "Anger";
  }
  return "Fear";
}

const EmotionMappingTable& EmotionMappingTable::standard() {
  static const EmotionMappingTable table = [] {
    Matrix m;
    // clang-format off
    //     Fear Hap  Sad  Ang
    m <<    0,   0,   0,  -1,   // O+
            0,   0,   0,   1,   // O-
           -1,   0,   0,   0,   // C+
            1,   0,   0,   0,   // C-
           -1,   1,  -1,  -1,   // E+
            1,   0,   0,   0,   // E-
            0,   0,   0,  -1,   // A+
            0,   0,   0,   1,   // A-
            1,  -1,   1,   1,   // N+
           -1,   1,  -1,  -1;   // N-
    // clang-format on
    return EmotionMappingTable(m);
  }();
  return table;
}

int EmotionMappingTable::operator()(Factor f, Polarity p, Emotion e) const {
  const auto row = static_cast<Eigen::Index>(2 * factor_index(f) + (p == Polarity::Negative ? 1 : 0));
  return entries_(row, static_cast<Eigen::Index>(e));
}

int emotion_contribution(const EmotionMappingTable& table, Factor factor, Polarity polarity, Emotion emotion) {
  return table(factor, polarity, emotion);
}

double EmotionScores::operator[](Emotion e) const {
  switch (e) {
    case Emotion::Fear: return fear;
    case Emotion::Happiness: return happiness;
    case Emotion::Sadness: return sadness;
    case Emotion::Anger: return anger;
  }
  return fear;
}

Emotion EmotionScores::dominant() const {
  Emotion best = Emotion::Fear;
  for (const auto e : kEmotions) {
    if ((*this)[e] > (*this)[best]) {
      best = e;
    }
  }
  return best;
}

EmotionScores emotions_from_ocean(const OceanScores& o, const EmotionMappingTable& table) {
  std::array<double, 4> raw{};
  for (const auto f : kFactors) {
    const double v = o[f];
    const double strength = 2.0 * std::abs(v - 0.5);
    for (const auto e : kEmotions) {
      raw[static_cast<std::size_t>(e)] += table(f, polarity(v), e) * strength;
    }
  }
  auto score = [&](Emotion e) { return std::clamp(0.5 + raw[static_cast<std::size_t>(e)] / 10.0, 0.0, 1.0); };
  return {score(Emotion::Fear), score(Emotion::Happiness), score(Emotion::Sadness), score(Emotion::Anger)};
}

std::string_view to_string(Trait t) {
  switch (t) {
    case Trait::O: return "O";
    case Trait::C: return "C";
    case Trait::E: return "E";
    case Trait::A: return "A";
    case Trait::N: return "N";
    case Trait::Fear: return "Fear";
    case Trait::Happiness: return "Happiness";
    case Trait::Sadness: return "Sadness";
    case Trait::Anger: return "Anger";
    case Trait::Socialization: return "Socialization";
  }
  return "O";
}

std::optional<Trait> parse_trait(std::string_view text) {
  if (const auto f = parse_factor(text)) {
    return static_cast<Trait>(*f);
  }
  const auto t = upper(text);
  if (t == "FEAR") return Trait::Fear;
  if (t == "HAPPINESS") return Trait::Happiness;
  if (t == "SADNESS") return Trait::Sadness;
  if (t == "ANGER") return Trait::Anger;
  if (t == "SOCIALIZATION" || t == "SOCIABLE") return Trait::Socialization;
  return std::nullopt;
}

double TraitProfile::score(Trait t) const {
  double v = 0.0;
  switch (t) {
    case Trait::O: v = ocean.O; break;
    case Trait::C: v = ocean.C; break;
    case Trait::E: v = ocean.E; break;
    case Trait::A: v = ocean.A; break;
    case Trait::N: v = ocean.N; break;
    case Trait::Fear: v = emotions.fear; break;
    case Trait::Happiness: v = emotions.happiness; break;
    case Trait::Sadness: v = emotions.sadness; break;
    case Trait::Anger: v = emotions.anger; break;
    case Trait::Socialization: v = social.socialization; break;
  }
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::TraitUnavailable, std::string(to_string(t)));
  }
  return v;
}

std::string_view to_string(Comparison c) {
  switch (c) {
    case Comparison::A: return "A";
    case Comparison::B: return "B";
    case Comparison::Both: return "Both";
    case Comparison::Neither: return "Neither";
    case Comparison::Tie: return "Tie";
  }
  return "Tie";
}

Comparison compare_pedestrians(const TraitProfile& a, const TraitProfile& b, Trait trait,
                               const ComparisonBands& bands) {
  const double sa = a.score(trait);
  const double sb = b.score(trait);
  if (sa >= bands.both_min && sb >= bands.both_min) {
    return Comparison::Both;
  }
  if (sa <= bands.neither_max && sb <= bands.neither_max) {
    return Comparison::Neither;
  }
  if (std::abs(sa - sb) < bands.tie_threshold) {
    return Comparison::Tie;
  }
  return sa > sb ? Comparison::A : Comparison::B;
}

}  // namespace crowdlens
