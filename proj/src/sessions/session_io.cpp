#include "overgaze/sessions/session_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "overgaze/common/error.hpp"
#include "overgaze/common/io.hpp"

namespace og::sessions {

using gridworld::Action;
using gridworld::Coord;
using gridworld::GameState;
using gridworld::InteractEvent;
using gridworld::Item;
using gridworld::Subtask;
using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------- writing

void append_micros_as_seconds(std::string& out, int64_t us) {
    char buf[40];
    int64_t whole = us / 1000000;
    int64_t frac = us % 1000000;
    std::snprintf(buf, sizeof(buf), "%" PRId64 ".%06" PRId64, whole, frac);
    out += buf;
}

void append_fixed3(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    out += buf;
}

void append_quoted(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
}

void append_state(std::string& out, const GameState& s) {
    out += "{\"players\":[";
    for (int i = 0; i < 2; ++i) {
        const auto& p = s.players[i];
        if (i) out += ',';
        out += "{\"pos\":[" + std::to_string(p.pos.r) + ',' + std::to_string(p.pos.c) +
               "],\"dir\":\"" + gridworld::orientation_name(p.dir) + "\",\"held\":\"" +
               gridworld::item_name(p.held) + "\"}";
    }
    out += "],\"pots\":[";
    bool first = true;
    for (const auto& [pos, pot] : s.pots) {
        if (pot.onions == 0 && pot.timer == -1) continue;  // canonical: omit empty
        if (!first) out += ',';
        first = false;
        out += "{\"pos\":[" + std::to_string(pos.r) + ',' + std::to_string(pos.c) +
               "],\"onions\":" + std::to_string(pot.onions) +
               ",\"timer\":" + std::to_string(pot.timer) + '}';
    }
    out += "],\"counters\":[";
    first = true;
    for (const auto& [pos, item] : s.counters) {
        if (!first) out += ',';
        first = false;
        out += "{\"pos\":[" + std::to_string(pos.r) + ',' + std::to_string(pos.c) +
               "],\"item\":\"" + gridworld::item_name(item) + "\"}";
    }
    out += "],\"score\":" + std::to_string(s.score) + ",\"t\":" + std::to_string(s.t) + '}';
}

void append_eye(std::string& out, const std::optional<PixelPoint>& eye) {
    if (!eye) {
        out += "null";
        return;
    }
    out += '[';
    append_fixed3(out, eye->x);
    out += ',';
    append_fixed3(out, eye->y);
    out += ']';
}

}  // namespace

std::string serialize_session(const SessionLog& session) {
    std::string out;
    out.reserve(session.game.size() * 280 + session.gaze.size() * 90 + 256);

    out += "{\"version\":1,\"meta\":{\"participant_id\":";
    append_quoted(out, session.meta.participant_id);
    out += ",\"trial_id\":" + std::to_string(session.meta.trial_id) + ",\"layout\":";
    append_quoted(out, session.meta.layout);
    out += ",\"agent\":";
    append_quoted(out, session.meta.agent);
    out += ",\"seed\":" + std::to_string(session.meta.seed) + "}}\n";

    for (const auto& rec : session.game) {
        out += "{\"k\":\"game\",\"t\":" + std::to_string(rec.t) + ",\"ts\":";
        append_micros_as_seconds(out, rec.ts_us);
        out += ",\"state\":";
        append_state(out, rec.state);
        out += ",\"actions\":[\"";
        out += gridworld::action_name(rec.actions[0]);
        out += "\",\"";
        out += gridworld::action_name(rec.actions[1]);
        out += "\"],\"reward\":" + std::to_string(rec.reward) + ",\"events\":[";
        for (size_t i = 0; i < rec.events.size(); ++i) {
            if (i) out += ',';
            out += "{\"p\":" + std::to_string(rec.events[i].player) +
                   ",\"id\":" + std::to_string(static_cast<int>(rec.events[i].id)) + '}';
        }
        out += "]}\n";
    }

    for (const auto& g : session.gaze) {
        out += "{\"k\":\"gaze\",\"ts\":";
        append_micros_as_seconds(out, g.ts_us);
        out += ",\"left\":";
        append_eye(out, g.left);
        out += ",\"right\":";
        append_eye(out, g.right);
        out += ",\"pupil\":";
        if (g.pupil_mm)
            append_fixed3(out, *g.pupil_mm);
        else
            out += "null";
        out += "}\n";
    }

    out += "{\"k\":\"survey\",\"answers\":[";
    for (size_t i = 0; i < session.survey.answers.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(session.survey.answers[i]);
    }
    out += "]}\n";
    return out;
}

void write_session(const SessionLog& session, const std::filesystem::path& path) {
    validate_session(session);
    atomic_write_file(path, serialize_session(session));
}

namespace {

// ---------------------------------------------------------------- reading

int64_t seconds_to_micros(double sec) { return std::llround(sec * 1e6); }

Coord coord_from(const json& j, int line, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ParseError(std::string(what) + " must be [row, col]", line);
    return Coord{j[0].get<int>(), j[1].get<int>()};
}

GameState state_from(const json& j, int line) {
    GameState s;
    if (!j.is_object()) throw ParseError("state must be an object", line);
    const json& players = j.at("players");
    if (!players.is_array() || players.size() != 2)
        throw ParseError("state.players must have two entries", line);
    for (int i = 0; i < 2; ++i) {
        s.players[i].pos = coord_from(players[i].at("pos"), line, "player pos");
        s.players[i].dir = gridworld::orientation_from_name(players[i].at("dir").get<std::string>());
        s.players[i].held = gridworld::item_from_name(players[i].at("held").get<std::string>());
    }
    for (const json& p : j.at("pots")) {
        Coord pos = coord_from(p.at("pos"), line, "pot pos");
        gridworld::PotState pot;
        pot.onions = p.at("onions").get<int>();
        pot.timer = p.at("timer").get<int>();
        s.pots[pos] = pot;
    }
    for (const json& c : j.at("counters")) {
        Coord pos = coord_from(c.at("pos"), line, "counter pos");
        s.counters[pos] = gridworld::item_from_name(c.at("item").get<std::string>());
    }
    s.score = j.at("score").get<int>();
    s.t = j.at("t").get<int>();
    return s;
}

std::optional<PixelPoint> eye_from(const json& j, int line) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("eye coordinates must be [x, y] or null", line);
    return PixelPoint{j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

SessionLog parse_session(const std::string& text) {
    SessionLog session;
    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    bool have_header = false, have_survey = false;

    while (std::getline(ss, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        try {
            if (!have_header) {
                if (!j.is_object() || !j.contains("version") || !j.contains("meta"))
                    throw ParseError("first line must be the header", lineno);
                if (j.at("version").get<int>() != 1)
                    throw ParseError("unsupported version", lineno);
                const json& m = j.at("meta");
                session.meta.participant_id = m.at("participant_id").get<std::string>();
                session.meta.trial_id = m.at("trial_id").get<int>();
                session.meta.layout = m.at("layout").get<std::string>();
                session.meta.agent = m.at("agent").get<std::string>();
                session.meta.seed = m.at("seed").get<uint64_t>();
                have_header = true;
                continue;
            }
            std::string kind = j.at("k").get<std::string>();
            if (kind == "game") {
                GameRecord rec;
                rec.t = j.at("t").get<int>();
                rec.ts_us = seconds_to_micros(j.at("ts").get<double>());
                rec.state = state_from(j.at("state"), lineno);
                const json& acts = j.at("actions");
                if (!acts.is_array() || acts.size() != 2)
                    throw ParseError("actions must have two entries", lineno);
                rec.actions[0] = gridworld::action_from_name(acts[0].get<std::string>());
                rec.actions[1] = gridworld::action_from_name(acts[1].get<std::string>());
                rec.reward = j.at("reward").get<int>();
                for (const json& e : j.at("events")) {
                    int id = e.at("id").get<int>();
                    if (id < 0 || id >= gridworld::kNumSubtasks)
                        throw ParseError("event id out of range", lineno);
                    rec.events.push_back({e.at("p").get<int>(), static_cast<Subtask>(id)});
                }
                session.game.push_back(std::move(rec));
            } else if (kind == "gaze") {
                GazeSample g;
                g.ts_us = seconds_to_micros(j.at("ts").get<double>());
                g.left = eye_from(j.at("left"), lineno);
                g.right = eye_from(j.at("right"), lineno);
                if (!j.at("pupil").is_null()) g.pupil_mm = j.at("pupil").get<double>();
                session.gaze.push_back(g);
            } else if (kind == "survey") {
                const json& a = j.at("answers");
                if (!a.is_array() || a.size() != session.survey.answers.size())
                    throw ParseError("survey must have five answers", lineno);
                for (size_t i = 0; i < session.survey.answers.size(); ++i)
                    session.survey.answers[i] = a[i].get<int>();
                have_survey = true;
            } else {
                throw ParseError("unknown record kind '" + kind + "'", lineno);
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("missing or mistyped field: ") + e.what(), lineno);
        }
    }

    if (!have_header) throw ParseError("empty session file", lineno == 0 ? 1 : lineno);
    if (!have_survey) throw ParseError("missing survey record", lineno);
    validate_session(session);
    return session;
}

SessionLog read_session(const std::filesystem::path& path) {
    return parse_session(read_text_file(path));
}

}  // namespace og::sessions
