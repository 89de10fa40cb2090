#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <span>
#include <unordered_map>

#include "fakecti/corpus.hpp"
#include "fakecti/error.hpp"
#include "fakecti/rng.hpp"
#include "text_util.hpp"

namespace fakecti
{

std::string_view to_string(SplitMode mode) noexcept
{
    return mode == SplitMode::Stratified ? "stratified" : "campaign";
}

SplitMode parse_split_mode(std::string_view text)
{
    if (text == "stratified")
        return SplitMode::Stratified;
    if (text == "campaign" || text == "campaign-partitioned")
        return SplitMode::CampaignPartitioned;
    throw Error(ErrorCode::InvalidSpec, "unknown split mode '" + std::string(text) + "'");
}

void SplitSpec::validate() const
{
    if (parts.size() < 2)
        throw Error(ErrorCode::InvalidSpec, "a split needs at least two parts");
    double sum = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i)
    {
        const auto& p = parts[i];
        if (p.name.empty())
            throw Error(ErrorCode::InvalidSpec, "split part with empty name");
        if (!(p.fraction > 0.0 && p.fraction < 1.0))
            throw Error(ErrorCode::InvalidSpec, "fraction of '" + p.name + "' must lie in (0, 1)");
        for (std::size_t j = 0; j < i; ++j)
            if (parts[j].name == p.name)
                throw Error(ErrorCode::InvalidSpec, "duplicate split part '" + p.name + "'");
        sum += p.fraction;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidSpec, "split fractions sum to " + std::to_string(sum) + ", expected 1");
}

std::vector<SplitPart> parse_fractions(std::string_view text)
{
    std::vector<SplitPart> parts;
    while (!text.empty())
    {
        auto comma = text.find(',');
        auto item = detail::trim(text.substr(0, comma));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (item.empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::InvalidSpec, "expected name=fraction, got '" + std::string(item) + "'");
        SplitPart part;
        part.name = std::string(detail::trim(item.substr(0, eq)));
        auto value = std::string(detail::trim(item.substr(eq + 1)));
        try
        {
            std::size_t used = 0;
            part.fraction = std::stod(value, &used);
            if (used != value.size())
                throw std::invalid_argument(value);
        }
        catch (const std::exception&)
        {
            throw Error(ErrorCode::InvalidSpec, "bad fraction '" + value + "'");
        }
        parts.push_back(std::move(part));
    }
    return parts;
}

const std::vector<std::string>& SplitResult::part(std::string_view name) const
{
    for (const auto& [n, ids] : parts)
        if (n == name)
            return ids;
    throw Error(ErrorCode::InvalidSpec, "no split part named '" + std::string(name) + "'");
}

std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& fractions)
{
    std::vector<std::size_t> counts(fractions.size(), 0);
    std::vector<double> residues(fractions.size(), 0.0);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < fractions.size(); ++i)
    {
        const double quota = fractions[i] * static_cast<double>(total);
        counts[i] = static_cast<std::size_t>(std::floor(quota));
        residues[i] = quota - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    // Fractions summing to 1 within 1e-9 can leave at most parts.size() units.
    std::vector<std::size_t> order(fractions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return residues[a] > residues[b]; });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size())
    {
        ++counts[order[k]];
        ++assigned;
    }
    while (assigned > total)
    {
        // Only reachable when fractions overshoot 1; trim from the last parts.
        for (std::size_t i = counts.size(); i-- > 0 && assigned > total;)
            if (counts[i] > 0)
            {
                --counts[i];
                --assigned;
            }
    }
    return counts;
}

namespace
{

std::size_t largest_part(const std::vector<SplitPart>& parts)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < parts.size(); ++i)
        if (parts[i].fraction > parts[best].fraction)
            best = i;
    return best;
}

} // namespace

SplitResult stratified_split(const Dataset& dataset, const SplitSpec& spec)
{
    spec.validate();
    if (dataset.empty())
        throw Error(ErrorCode::InvalidSpec, "cannot split an empty dataset");

    const auto& articles = dataset.articles();
    std::vector<double> fractions;
    for (const auto& p : spec.parts)
        fractions.push_back(p.fraction);

    // Campaign groups in first-appearance order, members in file order.
    std::vector<std::string> campaign_order;
    std::unordered_map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < articles.size(); ++i)
    {
        auto [it, inserted] = members.try_emplace(articles[i].campaign);
        if (inserted)
            campaign_order.push_back(articles[i].campaign);
        it->second.push_back(i);
    }

    std::vector<std::size_t> assignment(articles.size(), 0);
    Xoshiro256StarStar rng(spec.seed);

    if (spec.mode == SplitMode::Stratified)
    {
        const std::size_t fallback = largest_part(spec.parts);
        for (const auto& campaign : campaign_order)
        {
            auto& group = members[campaign];
            if (group.size() < spec.parts.size())
            {
                for (auto idx : group)
                    assignment[idx] = fallback;
                continue;
            }
            fisher_yates(std::span<std::size_t>(group), rng);
            const auto counts = apportion(group.size(), fractions);
            std::size_t pos = 0;
            for (std::size_t p = 0; p < counts.size(); ++p)
                for (std::size_t k = 0; k < counts[p]; ++k)
                    assignment[group[pos++]] = p;
        }
    }
    else
    {
        std::vector<std::string> shuffled = campaign_order;
        fisher_yates(std::span<std::string>(shuffled), rng);
        const auto counts = apportion(shuffled.size(), fractions);
        std::size_t pos = 0;
        for (std::size_t p = 0; p < counts.size(); ++p)
            for (std::size_t k = 0; k < counts[p]; ++k)
                for (auto idx : members[shuffled[pos++]])
                    assignment[idx] = p;
    }

    SplitResult result;
    for (const auto& p : spec.parts)
        result.parts.emplace_back(p.name, std::vector<std::string>{});
    for (std::size_t i = 0; i < articles.size(); ++i)
        result.parts[assignment[i]].second.push_back(articles[i].id);
    return result;
}

} // namespace fakecti
