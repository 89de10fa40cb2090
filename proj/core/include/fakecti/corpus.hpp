#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fakecti
{

/// Campaign label used for attribution-only input whose true campaign is unknown.
inline constexpr std::string_view kUnlabeled = "unlabeled";

struct Article
{
    std::string id;
    std::string title;
    std::string text;
    std::optional<std::string> link;
    std::string campaign{kUnlabeled};
    std::optional<std::string> threat_actor;
    std::optional<std::string> medium;

    bool labeled() const noexcept
    {
        return !campaign.empty() && campaign != kUnlabeled;
    }
};

/// Ordered, id-unique collection of articles. Immutable once built.
class Dataset
{
  public:
    Dataset() = default;

    /// Throws Error(DuplicateId) or Error(EmptyText) on invalid input.
    explicit Dataset(std::vector<Article> articles);

    const std::vector<Article>& articles() const noexcept
    {
        return articles_;
    }
    const std::set<std::string>& campaigns() const noexcept
    {
        return campaigns_;
    }
    std::size_t size() const noexcept
    {
        return articles_.size();
    }
    bool empty() const noexcept
    {
        return articles_.empty();
    }

    const Article* find(std::string_view id) const;
    bool all_labeled() const;

  private:
    std::vector<Article> articles_;
    std::set<std::string> campaigns_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

// JSON Lines dataset format: keys id, title, text, link, campaign,
// threat_actor, medium. A missing id becomes "row-<line number>".
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(std::istream& in);
void write_dataset(std::ostream& out, const Dataset& dataset);

struct DatasetStats
{
    std::size_t n_samples = 0;
    std::size_t n_campaigns = 0;
    std::size_t n_threat_actors = 0;
    std::size_t n_sources = 0;

    friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats dataset_stats(const Dataset& dataset);

/// Registrable host of a URL ("https://www.bbc.co.uk/x" -> "bbc.co.uk").
/// Returns nullopt when no host can be extracted.
std::optional<std::string> source_of(std::string_view url);

// ---------------------------------------------------------------------------
// Splitting

enum class SplitMode
{
    Stratified,
    CampaignPartitioned,
};

std::string_view to_string(SplitMode mode) noexcept;
SplitMode parse_split_mode(std::string_view text);

struct SplitPart
{
    std::string name;
    double fraction = 0.0;
};

struct SplitSpec
{
    std::vector<SplitPart> parts;
    std::uint64_t seed = 0;
    SplitMode mode = SplitMode::Stratified;

    /// Throws Error(InvalidSpec).
    void validate() const;
};

/// Parses "train=0.66,test=0.34".
std::vector<SplitPart> parse_fractions(std::string_view text);

struct SplitResult
{
    /// Parts in declaration order; ids within a part keep dataset order.
    std::vector<std::pair<std::string, std::vector<std::string>>> parts;

    const std::vector<std::string>& part(std::string_view name) const;
};

/// Largest-remainder apportionment of `total` units over `fractions`.
/// Leftover units go to the largest fractional residues, ties to the
/// earlier part.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& fractions);

/// Stratified mode: each campaign is shuffled (Fisher-Yates, xoshiro256**
/// seeded from spec.seed) and apportioned across parts. Campaigns with fewer
/// articles than parts go wholly to the largest-fraction part.
/// Campaign-partitioned mode: whole campaigns are shuffled and apportioned.
SplitResult stratified_split(const Dataset& dataset, const SplitSpec& spec);

} // namespace fakecti
