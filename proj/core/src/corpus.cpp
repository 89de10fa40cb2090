#include "fakecti/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "fakecti/error.hpp"
#include "text_util.hpp"

namespace fakecti
{

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::TransportFailure: return "TransportFailure";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MissingGold: return "MissingGold";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ProviderFailure: return "ProviderFailure";
    case ErrorCode::EmptyCampaign: return "EmptyCampaign";
    case ErrorCode::ModalityMismatch: return "ModalityMismatch";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyArticle: return "EmptyArticle";
    }
    return "Unknown";
}

Dataset::Dataset(std::vector<Article> articles) : articles_(std::move(articles))
{
    by_id_.reserve(articles_.size());
    for (std::size_t i = 0; i < articles_.size(); ++i)
    {
        const Article& a = articles_[i];
        if (a.id.empty())
            throw Error(ErrorCode::MalformedLine, "article at position " + std::to_string(i) + " has an empty id");
        if (detail::trim(a.text).empty())
            throw Error(ErrorCode::EmptyText, a.id);
        if (!by_id_.emplace(a.id, i).second)
            throw Error(ErrorCode::DuplicateId, a.id);
        if (!a.campaign.empty())
            campaigns_.insert(a.campaign);
    }
}

const Article* Dataset::find(std::string_view id) const
{
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &articles_[it->second];
}

bool Dataset::all_labeled() const
{
    for (const auto& a : articles_)
        if (!a.labeled())
            return false;
    return true;
}

namespace
{

bool is_ipv4(std::string_view host)
{
    if (host.empty())
        return false;
    for (char c : host)
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.')
            return false;
    return true;
}

// Second-level labels under which country-code domains register names
// (bbc.co.uk, abc.net.au). Without a public-suffix list this covers the
// common cases.
constexpr std::array kSecondLevel{"ac", "co", "com", "edu", "gov", "net", "org", "or", "ne", "go", "gob", "nic"};

} // namespace

std::optional<std::string> source_of(std::string_view url)
{
    std::string_view rest = detail::trim(url);
    if (auto scheme = rest.find("://"); scheme != std::string_view::npos)
        rest.remove_prefix(scheme + 3);
    else if (rest.starts_with("//"))
        rest.remove_prefix(2);

    rest = rest.substr(0, rest.find_first_of("/?#"));
    if (auto at = rest.rfind('@'); at != std::string_view::npos)
        rest.remove_prefix(at + 1);
    if (rest.starts_with('['))
    {
        auto close = rest.find(']');
        if (close == std::string_view::npos)
            return std::nullopt;
        return std::string(rest.substr(0, close + 1));
    }
    rest = rest.substr(0, rest.find(':'));
    while (rest.ends_with('.'))
        rest.remove_suffix(1);

    std::string host = detail::lower_ascii(rest);
    if (host.empty())
        return std::nullopt;
    if (is_ipv4(host))
        return host;

    std::vector<std::string_view> labels;
    std::string_view view = host;
    for (;;)
    {
        auto dot = view.find('.');
        labels.push_back(view.substr(0, dot));
        if (dot == std::string_view::npos)
            break;
        view.remove_prefix(dot + 1);
    }
    for (auto label : labels)
        if (label.empty())
            return std::nullopt;
    if (labels.size() <= 2)
        return host;

    std::size_t keep = 2;
    const auto tld = labels[labels.size() - 1];
    const auto sld = labels[labels.size() - 2];
    if (tld.size() == 2 && std::find(kSecondLevel.begin(), kSecondLevel.end(), sld) != kSecondLevel.end())
        keep = 3;
    keep = std::min(keep, labels.size());

    std::string out;
    for (std::size_t i = labels.size() - keep; i < labels.size(); ++i)
    {
        if (!out.empty())
            out += '.';
        out += labels[i];
    }
    return out;
}

DatasetStats dataset_stats(const Dataset& dataset)
{
    std::set<std::string> campaigns, actors, sources;
    for (const auto& a : dataset.articles())
    {
        if (a.labeled())
            campaigns.insert(a.campaign);
        if (a.threat_actor && !detail::trim(*a.threat_actor).empty())
            actors.insert(*a.threat_actor);
        if (a.link)
            if (auto source = source_of(*a.link))
                sources.insert(*source);
    }
    return DatasetStats{dataset.size(), campaigns.size(), actors.size(), sources.size()};
}

} // namespace fakecti
