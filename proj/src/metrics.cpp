#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "mmrec/error.hpp"
#include "mmrec/evaluation.hpp"

namespace mmrec {

std::string_view to_string(RecEventKind kind) {
    switch (kind) {
        case RecEventKind::shown: return "shown";
        case RecEventKind::clicked: return "clicked";
        case RecEventKind::linked: return "linked";
        case RecEventKind::annotated: return "annotated";
        case RecEventKind::cited: return "cited";
    }
    return "shown";
}

RecEventKind parse_rec_event_kind(std::string_view text) {
    if (text == "shown") return RecEventKind::shown;
    if (text == "clicked") return RecEventKind::clicked;
    if (text == "linked") return RecEventKind::linked;
    if (text == "annotated") return RecEventKind::annotated;
    if (text == "cited") return RecEventKind::cited;
    throw Error(Errc::malformed_row, "unknown event kind '" + std::string(text) + "'");
}

namespace {

struct Counts {
    std::size_t shown = 0;
    std::size_t clicked = 0;
};

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::map<std::string, RateMetrics> online_metrics(std::span<const RecEvent> events,
                                                  std::span<const SetRating> ratings,
                                                  const GroupKey& group) {
    auto key_of = [&](const std::string& set_id, const std::string& user_id) {
        return group ? group(set_id, user_id) : std::string("all");
    };

    std::set<std::tuple<std::string_view, DocId, RecEventKind>> seen;
    std::map<std::string, RateMetrics> report;
    std::map<std::string, std::map<std::string_view, Counts>> per_set;
    std::map<std::string, std::map<std::string_view, Counts>> per_user;
    std::size_t total_shown = 0;

    for (const auto& e : events) {
        if (!seen.emplace(e.set_id, e.doc, e.kind).second) continue;
        const auto key = key_of(e.set_id, e.user_id);
        auto& m = report[key];
        switch (e.kind) {
            case RecEventKind::shown:
                ++m.shown;
                ++total_shown;
                ++per_set[key][e.set_id].shown;
                ++per_user[key][e.user_id].shown;
                break;
            case RecEventKind::clicked:
                ++m.clicked;
                ++per_set[key][e.set_id].clicked;
                ++per_user[key][e.user_id].clicked;
                break;
            case RecEventKind::linked: ++m.linked; break;
            case RecEventKind::annotated: ++m.annotated; break;
            case RecEventKind::cited: ++m.cited; break;
        }
    }
    if (total_shown == 0) throw Error(Errc::no_impressions, "event log contains no impressions");

    std::map<std::string, std::pair<double, std::size_t>> rating_sums;
    for (const auto& r : ratings) {
        auto& [sum, n] = rating_sums[key_of(r.set_id, r.user_id)];
        sum += r.stars;
        ++n;
    }

    auto mean_ctr = [](const std::map<std::string_view, Counts>& parts, std::size_t& n) {
        double sum = 0.0;
        n = 0;
        for (const auto& [id, c] : parts) {
            if (c.shown == 0) continue;
            sum += ratio(c.clicked, c.shown);
            ++n;
        }
        return n == 0 ? 0.0 : sum / static_cast<double>(n);
    };

    for (auto& [key, m] : report) {
        m.ctr = ratio(m.clicked, m.shown);
        m.ltr = ratio(m.linked, m.shown);
        m.atr = ratio(m.annotated, m.shown);
        m.citr = ratio(m.cited, m.shown);
        m.ctr_set = mean_ctr(per_set[key], m.sets);
        m.ctr_user = mean_ctr(per_user[key], m.users);
    }
    for (const auto& [key, sums] : rating_sums) {
        auto& m = report[key];
        m.ratings = sums.second;
        m.mean_rating = sums.first / static_cast<double>(sums.second);
    }
    return report;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(Errc::degenerate_series, "pearson needs two equally long series of length >= 2");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw Error(Errc::degenerate_series, "pearson of a constant series is undefined");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<IterationRow> reiteration_report(std::span<const RecEvent> events) {
    struct Showing {
        Timestamp at;
        std::string_view set_id;
    };
    std::map<std::pair<std::string_view, DocId>, std::vector<Showing>> showings;
    std::set<std::pair<std::string_view, DocId>> shown_once;
    std::set<std::pair<std::string_view, DocId>> clicked;
    for (const auto& e : events) {
        if (e.kind == RecEventKind::shown) {
            if (shown_once.emplace(e.set_id, e.doc).second)
                showings[{e.user_id, e.doc}].push_back({e.at, e.set_id});
        } else if (e.kind == RecEventKind::clicked) {
            clicked.emplace(e.set_id, e.doc);
        }
    }

    std::vector<IterationRow> rows;
    for (auto& [pair, list] : showings) {
        std::sort(list.begin(), list.end(), [](const Showing& a, const Showing& b) {
            return std::tie(a.at, a.set_id) < std::tie(b.at, b.set_id);
        });
        bool clicked_before = false;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (rows.size() <= i) rows.push_back(IterationRow{i + 1});
            auto& row = rows[i];
            ++row.shown;
            const bool click = clicked.count({list[i].set_id, pair.second}) > 0;
            if (click) {
                ++row.clicks;
                if (clicked_before) ++row.oblivious;
            }
            clicked_before = clicked_before || click;
        }
    }
    for (auto& row : rows) {
        row.ctr = ratio(row.clicks, row.shown);
        row.first_click_ctr = ratio(row.clicks - row.oblivious, row.shown);
    }
    return rows;
}

}  // namespace mmrec
