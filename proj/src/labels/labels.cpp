#include "overgaze/labels/labels.hpp"

#include <algorithm>

#include <json.hpp>

#include "overgaze/common/error.hpp"
#include "overgaze/gridworld/layout.hpp"
#include "overgaze/gridworld/step.hpp"

namespace og::labels {

using gridworld::Action;
using gridworld::GameState;
using gridworld::Item;
using gridworld::Layout;
using gridworld::Subtask;
using gridworld::TileKind;
using sessions::SessionLog;

int trust_label(const SessionLog& session) {
    if (!session.survey.present())
        throw ValidationError("survey", "no survey was administered for this round");
    return session.survey.trust();
}

int final_score(const SessionLog& session) {
    if (session.game.empty()) throw ValidationError("game", "empty round");
    const sessions::GameRecord& last = session.game.back();
    return last.state.score + last.reward;
}

std::map<std::string, int> proficiency_bins(
    const std::vector<std::pair<std::string, int>>& scores, const std::string& group) {
    const size_t n = scores.size();
    if (n < 3)
        throw ValidationError("group." + group,
                              "tertiles need at least 3 sessions, got " + std::to_string(n));

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return scores[a].second != scores[b].second ? scores[a].second < scores[b].second
                                                    : scores[a].first < scores[b].first;
    });

    // Provisional bin by sorted position, then pull every member of a tied
    // score value down to the lowest bin the value touches.
    std::map<int, int> bin_of_score;
    for (size_t p = 0; p < n; ++p) {
        int score = scores[order[p]].second;
        int bin = static_cast<int>(p * 3 / n);
        auto [it, inserted] = bin_of_score.try_emplace(score, bin);
        if (!inserted) it->second = std::min(it->second, bin);
    }

    std::map<std::string, int> out;
    for (const auto& [id, score] : scores) {
        if (!out.try_emplace(id, bin_of_score.at(score)).second)
            throw ValidationError("group." + group, "duplicate session id '" + id + "'");
    }
    return out;
}

namespace {

Subtask classify_delta(Item before, Item after, TileKind faced) {
    const bool counter = faced == TileKind::Counter;
    if (before == Item::None && after == Item::Onion)
        return counter ? Subtask::GetOnionFromCounter : Subtask::GetOnionFromDispenser;
    if (before == Item::None && after == Item::Dish)
        return counter ? Subtask::GetDishFromCounter : Subtask::GetDishFromDispenser;
    if (before == Item::None && after == Item::Soup) return Subtask::GetSoupFromCounter;
    if (before == Item::Dish && after == Item::Soup) return Subtask::GetSoupFromPot;
    if (before == Item::Onion && after == Item::None)
        return counter ? Subtask::PutOnionOnCounter : Subtask::PutOnionInPot;
    if (before == Item::Dish && after == Item::None) return Subtask::PutDishOnCounter;
    if (before == Item::Soup && after == Item::None)
        return counter ? Subtask::PutSoupOnCounter : Subtask::ServeSoup;
    throw ValidationError("session.game", "interact produced an impossible held-item change");
}

}  // namespace

std::vector<std::pair<int, Subtask>> detect_subtasks(const SessionLog& session) {
    const Layout& layout = gridworld::builtin_layout(session.meta.layout);
    std::vector<std::pair<int, Subtask>> out;
    for (size_t t = 0; t < session.game.size(); ++t) {
        const auto& rec = session.game[t];
        if (rec.actions[0] != Action::Interact) continue;

        const GameState* after = nullptr;
        GameState replayed;
        if (t + 1 < session.game.size()) {
            after = &session.game[t + 1].state;
        } else {
            replayed = gridworld::step(rec.state, layout, rec.actions).state;
            after = &replayed;
        }

        Item before_held = rec.state.players[0].held;
        Item after_held = after->players[0].held;
        if (before_held == after_held) continue;  // no-op interact

        auto delta = gridworld::orientation_delta(rec.state.players[0].dir);
        gridworld::Coord faced{rec.state.players[0].pos.r + delta.r,
                               rec.state.players[0].pos.c + delta.c};
        out.emplace_back(static_cast<int>(t),
                         classify_delta(before_held, after_held, layout.at(faced)));
    }
    return out;
}

std::vector<int> full_intent_labels(const SessionLog& session) {
    std::vector<int> labels(session.game.size(), -1);
    auto completions = detect_subtasks(session);
    // Walk backward so each timestep sees the next completion at or after it.
    int next = -1;
    auto it = completions.rbegin();
    for (int t = static_cast<int>(labels.size()) - 1; t >= 0; --t) {
        while (it != completions.rend() && it->first == t) {
            next = static_cast<int>(it->second);
            ++it;
        }
        labels[t] = next;
    }
    return labels;
}

std::vector<int> intent_labels(const SessionLog& session, const features::WindowSpec& window) {
    features::check_window(window, session.game.size());
    auto full = full_intent_labels(session);
    return {full.begin() + window.start_t, full.begin() + window.start_t + window.length};
}

std::string label_sidecar(const SessionLog& session, int proficiency) {
    nlohmann::json j;
    j["trust"] = trust_label(session);
    j["proficiency"] = proficiency;
    auto completions = detect_subtasks(session);
    nlohmann::json intents = nlohmann::json::array();
    for (const auto& [t, id] : completions)
        intents.push_back({{"t", t}, {"id", static_cast<int>(id)}});
    j["intents"] = std::move(intents);
    j["masked_after"] = completions.empty() ? 0 : completions.back().first + 1;
    return j.dump(2) + "\n";
}

}  // namespace og::labels
