// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Scenario files: a structured plain-text format driving the harness.
//
// A scenario is a header of declarations (actors, funds, propositions,
// channels) followed by an ordered list of directives. The runner executes
// it against a fresh harness and renders a report — final holdings, channel
// statuses, probability lines, and invariant checks — whose text is stable
// across seeds, so reports double as committed fixtures.
//
//     scenario bet-settle-cooperative
//     summary  A bet made and settled off-chain once the proof appears
//     seed 7
//     actor alice honest
//     actor bob honest
//     funds alice 100
//     funds bob 100
//     prop P provable
//     channel ab alice bob 100 100
//
//     open ab
//     bet ab alice 50 10 P +100
//     reveal bob P
//     close ab
//     expect alice 50
//     expect bob 150
//
// Deadlines and advances are in blocks; a `+N` deadline is relative to the
// chain height when the directive runs.

#ifndef PROOFCHANNELS_SCENARIO_HPP
#define PROOFCHANNELS_SCENARIO_HPP

#include "peer.hpp"

namespace pfc {

//! Parse or validation failure; the CLI maps it to exit code 2.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioActor {
    std::string name;
    PolicySpec policy;
};

struct ScenarioChannel {
    std::string id;
    std::string party_a;
    std::string party_b;
    Amount contrib_a;
    Amount contrib_b;
    RelativeDelay csv{48};
};

struct ScenarioProp {
    std::string name;
    bool provable = true;
};

struct Directive {
    enum class Kind {
        Open,
        Pay,
        Bet,
        Reveal,
        Register,
        Settle,
        Close,
        CloseUnilateral,
        Advance,
        Route,
        Hedge,
        Drop,
        Silence,
        Withhold,
        PublishRevoked,
        Finish,
    };
    Kind kind = Kind::Open;
    std::string chan;
    std::string chan2;   // hedge target
    std::string actor;
    std::string prop;
    std::string msg;     // drop: message name or "*"
    std::string from;    // drop
    std::string to;      // drop
    Amount amount;       // pay / route amount, bet doubter stake
    Amount amount2;      // bet backer stake
    std::vector<std::string> chans;  // route path
    std::vector<Amount> fees;        // route fees
    std::uint32_t number = 0;        // advance blocks / drop count / revision / budget
    std::uint32_t height = 0;        // bet deadline
    bool relative = false;           // deadline written as +N
    std::size_t line = 0;
};

struct Scenario {
    std::string name;
    std::string summary;
    std::uint64_t seed = 7;
    std::vector<ScenarioActor> actors;
    std::vector<std::pair<std::string, Amount>> funds;
    std::vector<ScenarioProp> props;
    std::vector<ScenarioChannel> channels;
    std::vector<Directive> script;
    std::vector<std::pair<std::string, Amount>> expected_holdings;
    std::vector<std::pair<std::string, std::string>> expected_statuses;  // chan -> status name
};

// ---- parsing ----

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline std::uint32_t parse_u32(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        unsigned long v = std::stoul(s, &used);
        if (used != s.size() || v > 0xffffffffUL) throw std::invalid_argument(s);
        return static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
        throw ScenarioError("line " + std::to_string(line) + ": bad number '" + s + "'");
    }
}

inline Amount parse_amount(const std::string& s, std::size_t line) {
    try {
        return Amount::parse_bars(s);
    } catch (const std::exception& e) {
        throw ScenarioError("line " + std::to_string(line) + ": bad amount '" + s + "': " +
                            e.what());
    }
}

inline PolicyKind parse_policy_kind(const std::string& s, std::size_t line) {
    if (s == "manual") return PolicyKind::Manual;
    if (s == "honest" || s == "honest-doubter" || s == "honest-backer") return PolicyKind::Honest;
    if (s == "cheater") return PolicyKind::Cheater;
    if (s == "withholder") return PolicyKind::Withholder;
    if (s == "public-revealer") return PolicyKind::PublicRevealer;
    throw ScenarioError("line " + std::to_string(line) + ": unknown policy '" + s + "'");
}

inline void need(bool ok, std::size_t line, const std::string& what) {
    if (!ok) throw ScenarioError("line " + std::to_string(line) + ": " + what);
}

} // namespace detail

inline Scenario parse_scenario(const std::string& text) {
    using detail::need;
    Scenario sc;
    std::istringstream is(text);
    std::string raw;
    std::size_t line_no = 0;
    bool in_script = false;

    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        std::vector<std::string> t = detail::split_ws(line);
        if (t.empty()) continue;
        const std::string& kw = t[0];

        auto directive = [&](Directive::Kind k) {
            in_script = true;
            Directive d;
            d.kind = k;
            d.line = line_no;
            return d;
        };
        auto header_allowed = [&] {
            need(!in_script, line_no, "declaration '" + kw + "' after the first directive");
        };

        if (kw == "scenario") {
            header_allowed();
            need(t.size() == 2, line_no, "usage: scenario <name>");
            sc.name = t[1];
        } else if (kw == "summary") {
            header_allowed();
            need(t.size() >= 2, line_no, "usage: summary <text>");
            std::string s;
            for (std::size_t i = 1; i < t.size(); ++i) s += (i > 1 ? " " : "") + t[i];
            sc.summary = s;
        } else if (kw == "seed") {
            header_allowed();
            need(t.size() == 2, line_no, "usage: seed <n>");
            sc.seed = detail::parse_u32(t[1], line_no);
        } else if (kw == "actor") {
            header_allowed();
            need(t.size() >= 3, line_no, "usage: actor <name> <policy> [k=v ...]");
            ScenarioActor a;
            a.name = t[1];
            a.policy.kind = detail::parse_policy_kind(t[2], line_no);
            for (std::size_t i = 3; i < t.size(); ++i) {
                std::size_t eq = t[i].find('=');
                need(eq != std::string::npos, line_no, "bad policy parameter '" + t[i] + "'");
                std::string k = t[i].substr(0, eq);
                std::string v = t[i].substr(eq + 1);
                if (k == "grace")
                    a.policy.grace = detail::parse_u32(v, line_no);
                else if (k == "rev")
                    a.policy.cheat_revision = detail::parse_u32(v, line_no);
                else
                    throw ScenarioError("line " + std::to_string(line_no) +
                                        ": unknown policy parameter '" + k + "'");
            }
            sc.actors.push_back(a);
        } else if (kw == "funds") {
            header_allowed();
            need(t.size() == 3, line_no, "usage: funds <actor> <amount>");
            sc.funds.emplace_back(t[1], detail::parse_amount(t[2], line_no));
        } else if (kw == "prop") {
            header_allowed();
            need(t.size() == 3 && (t[2] == "provable" || t[2] == "unprovable"), line_no,
                 "usage: prop <name> provable|unprovable");
            sc.props.push_back(ScenarioProp{t[1], t[2] == "provable"});
        } else if (kw == "channel") {
            header_allowed();
            need(t.size() == 6 || t.size() == 8, line_no,
                 "usage: channel <id> <a> <b> <contribA> <contribB> [csv <n>]");
            ScenarioChannel c;
            c.id = t[1];
            c.party_a = t[2];
            c.party_b = t[3];
            c.contrib_a = detail::parse_amount(t[4], line_no);
            c.contrib_b = detail::parse_amount(t[5], line_no);
            if (t.size() == 8) {
                need(t[6] == "csv", line_no, "expected 'csv <n>'");
                c.csv = RelativeDelay{detail::parse_u32(t[7], line_no)};
            }
            sc.channels.push_back(c);
        } else if (kw == "open") {
            need(t.size() == 2, line_no, "usage: open <chan>");
            Directive d = directive(Directive::Kind::Open);
            d.chan = t[1];
            sc.script.push_back(d);
        } else if (kw == "pay") {
            need(t.size() == 4, line_no, "usage: pay <chan> <from> <amount>");
            Directive d = directive(Directive::Kind::Pay);
            d.chan = t[1];
            d.actor = t[2];
            d.amount = detail::parse_amount(t[3], line_no);
            sc.script.push_back(d);
        } else if (kw == "bet") {
            need(t.size() == 7, line_no,
                 "usage: bet <chan> <doubter> <doubterStake> <backerStake> <prop> <deadline>");
            Directive d = directive(Directive::Kind::Bet);
            d.chan = t[1];
            d.actor = t[2];
            d.amount = detail::parse_amount(t[3], line_no);
            d.amount2 = detail::parse_amount(t[4], line_no);
            d.prop = t[5];
            std::string dl = t[6];
            if (!dl.empty() && dl[0] == '+') {
                d.relative = true;
                dl = dl.substr(1);
            }
            d.height = detail::parse_u32(dl, line_no);
            sc.script.push_back(d);
        } else if (kw == "reveal") {
            need(t.size() == 3, line_no, "usage: reveal <actor> <prop>");
            Directive d = directive(Directive::Kind::Reveal);
            d.actor = t[1];
            d.prop = t[2];
            sc.script.push_back(d);
        } else if (kw == "register") {
            need(t.size() == 2, line_no, "usage: register <prop>");
            Directive d = directive(Directive::Kind::Register);
            d.prop = t[1];
            sc.script.push_back(d);
        } else if (kw == "settle") {
            need(t.size() == 4, line_no, "usage: settle <chan> <prop> <winner>");
            Directive d = directive(Directive::Kind::Settle);
            d.chan = t[1];
            d.prop = t[2];
            d.actor = t[3];
            sc.script.push_back(d);
        } else if (kw == "close") {
            need(t.size() == 2, line_no, "usage: close <chan>");
            Directive d = directive(Directive::Kind::Close);
            d.chan = t[1];
            sc.script.push_back(d);
        } else if (kw == "close-unilateral") {
            need(t.size() == 3, line_no, "usage: close-unilateral <chan> <actor>");
            Directive d = directive(Directive::Kind::CloseUnilateral);
            d.chan = t[1];
            d.actor = t[2];
            sc.script.push_back(d);
        } else if (kw == "advance") {
            need(t.size() == 2, line_no, "usage: advance <blocks>");
            Directive d = directive(Directive::Kind::Advance);
            d.number = detail::parse_u32(t[1], line_no);
            sc.script.push_back(d);
        } else if (kw == "route") {
            // route <amount> <chan> [<chan> ...] [fees <f> ...]
            need(t.size() >= 3, line_no, "usage: route <amount> <chan>... [fees <f>...]");
            Directive d = directive(Directive::Kind::Route);
            d.amount = detail::parse_amount(t[1], line_no);
            std::size_t i = 2;
            while (i < t.size() && t[i] != "fees") d.chans.push_back(t[i++]);
            if (i < t.size() && t[i] == "fees")
                for (++i; i < t.size(); ++i) d.fees.push_back(detail::parse_amount(t[i], line_no));
            sc.script.push_back(d);
        } else if (kw == "hedge") {
            need(t.size() == 4, line_no, "usage: hedge <upChan> <downChan> <prop>");
            Directive d = directive(Directive::Kind::Hedge);
            d.chan = t[1];
            d.chan2 = t[2];
            d.prop = t[3];
            sc.script.push_back(d);
        } else if (kw == "drop") {
            need(t.size() == 5, line_no, "usage: drop <msg|*> <from|*> <to|*> <count>");
            Directive d = directive(Directive::Kind::Drop);
            d.msg = t[1];
            d.from = t[2] == "*" ? "" : t[2];
            d.to = t[3] == "*" ? "" : t[3];
            d.number = detail::parse_u32(t[4], line_no);
            sc.script.push_back(d);
        } else if (kw == "silence") {
            need(t.size() == 2, line_no, "usage: silence <actor>");
            Directive d = directive(Directive::Kind::Silence);
            d.actor = t[1];
            sc.script.push_back(d);
        } else if (kw == "withhold") {
            need(t.size() == 2, line_no, "usage: withhold <actor>");
            Directive d = directive(Directive::Kind::Withhold);
            d.actor = t[1];
            sc.script.push_back(d);
        } else if (kw == "publish-revoked") {
            need(t.size() == 4, line_no, "usage: publish-revoked <chan> <actor> <revision>");
            Directive d = directive(Directive::Kind::PublishRevoked);
            d.chan = t[1];
            d.actor = t[2];
            d.number = detail::parse_u32(t[3], line_no);
            sc.script.push_back(d);
        } else if (kw == "finish") {
            need(t.size() <= 2, line_no, "usage: finish [maxRounds]");
            Directive d = directive(Directive::Kind::Finish);
            d.number = t.size() == 2 ? detail::parse_u32(t[1], line_no) : 0;
            sc.script.push_back(d);
        } else if (kw == "expect") {
            in_script = true;
            need(t.size() == 3, line_no, "usage: expect <actor> <amount>");
            sc.expected_holdings.emplace_back(t[1], detail::parse_amount(t[2], line_no));
        } else if (kw == "expect-status") {
            in_script = true;
            need(t.size() == 3, line_no, "usage: expect-status <chan> <status>");
            sc.expected_statuses.emplace_back(t[1], t[2]);
        } else {
            throw ScenarioError("line " + std::to_string(line_no) + ": unknown keyword '" +
                                kw + "'");
        }
    }
    return sc;
}

//! Static checks: every name referenced by a directive is declared.
inline void validate_scenario(const Scenario& sc) {
    if (sc.name.empty()) throw ScenarioError("scenario has no name");
    std::set<std::string> actors, props, chans;
    for (const auto& a : sc.actors)
        if (!actors.insert(a.name).second)
            throw ScenarioError("duplicate actor '" + a.name + "'");
    for (const auto& p : sc.props)
        if (!props.insert(p.name).second)
            throw ScenarioError("duplicate proposition '" + p.name + "'");
    for (const auto& c : sc.channels) {
        if (!chans.insert(c.id).second) throw ScenarioError("duplicate channel '" + c.id + "'");
        if (!actors.count(c.party_a) || !actors.count(c.party_b))
            throw ScenarioError("channel '" + c.id + "' references unknown actors");
        if (c.party_a == c.party_b)
            throw ScenarioError("channel '" + c.id + "' needs two distinct parties");
    }
    for (const auto& [who, amount] : sc.funds) {
        (void)amount;
        if (!actors.count(who)) throw ScenarioError("funds for unknown actor '" + who + "'");
    }
    auto want_actor = [&](const std::string& n, std::size_t line) {
        if (!actors.count(n))
            throw ScenarioError("line " + std::to_string(line) + ": unknown actor '" + n + "'");
    };
    auto want_chan = [&](const std::string& n, std::size_t line) {
        if (!chans.count(n))
            throw ScenarioError("line " + std::to_string(line) + ": unknown channel '" + n + "'");
    };
    auto want_prop = [&](const std::string& n, std::size_t line) {
        if (!props.count(n))
            throw ScenarioError("line " + std::to_string(line) + ": unknown proposition '" + n +
                                "'");
    };
    for (const Directive& d : sc.script) {
        switch (d.kind) {
            case Directive::Kind::Open:
            case Directive::Kind::Close: want_chan(d.chan, d.line); break;
            case Directive::Kind::Pay:
            case Directive::Kind::CloseUnilateral:
            case Directive::Kind::PublishRevoked:
                want_chan(d.chan, d.line);
                want_actor(d.actor, d.line);
                break;
            case Directive::Kind::Bet:
                want_chan(d.chan, d.line);
                want_actor(d.actor, d.line);
                want_prop(d.prop, d.line);
                break;
            case Directive::Kind::Reveal:
                want_actor(d.actor, d.line);
                want_prop(d.prop, d.line);
                break;
            case Directive::Kind::Register: want_prop(d.prop, d.line); break;
            case Directive::Kind::Settle:
                want_chan(d.chan, d.line);
                want_prop(d.prop, d.line);
                want_actor(d.actor, d.line);
                break;
            case Directive::Kind::Route:
                if (d.chans.empty())
                    throw ScenarioError("line " + std::to_string(d.line) +
                                        ": route needs at least one channel");
                for (const auto& c : d.chans) want_chan(c, d.line);
                if (d.fees.size() + 1 != d.chans.size())
                    throw ScenarioError("line " + std::to_string(d.line) +
                                        ": route needs one fee per intermediary");
                break;
            case Directive::Kind::Hedge:
                want_chan(d.chan, d.line);
                want_chan(d.chan2, d.line);
                want_prop(d.prop, d.line);
                break;
            case Directive::Kind::Silence:
            case Directive::Kind::Withhold: want_actor(d.actor, d.line); break;
            case Directive::Kind::Drop:
            case Directive::Kind::Advance:
            case Directive::Kind::Finish: break;
        }
    }
    // Reveals of unprovable propositions can never produce a valid blob.
    for (const Directive& d : sc.script) {
        if (d.kind != Directive::Kind::Reveal && d.kind != Directive::Kind::Register) continue;
        for (const auto& p : sc.props)
            if (p.name == d.prop && !p.provable)
                throw ScenarioError("line " + std::to_string(d.line) + ": proposition '" +
                                    d.prop + "' is unprovable");
    }
    for (const auto& [who, amount] : sc.expected_holdings) {
        (void)amount;
        if (!actors.count(who))
            throw ScenarioError("expectation references unknown actor '" + who + "'");
    }
    for (const auto& [chan, status] : sc.expected_statuses) {
        (void)status;
        if (!chans.count(chan))
            throw ScenarioError("expectation references unknown channel '" + chan + "'");
    }
}

// ---- running ----

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Report {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, Amount>> holdings;  // declaration order
    std::vector<std::tuple<std::string, std::string, std::uint32_t>> statuses;
    std::vector<std::string> probability_lines;
    std::vector<CheckResult> checks;
    std::vector<std::string> event_log;

    bool pass() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }

    //! Fixture text: everything except the event log, which varies with the
    //! seed while this rendering does not.
    std::string render() const {
        std::ostringstream os;
        os << "scenario=" << scenario << "\n";
        for (const std::string& p : probability_lines) os << p << "\n";
        for (const auto& [who, amount] : holdings)
            os << "holding actor=" << who << " amount=" << amount.to_bars_string() << "\n";
        for (const auto& [chan, status, rev] : statuses)
            os << "channel id=" << chan << " status=" << status << " revision=" << rev << "\n";
        for (const CheckResult& c : checks) {
            os << "check name=" << c.name << " result=" << (c.pass ? "pass" : "fail");
            if (!c.pass && !c.detail.empty()) os << " detail=" << c.detail;
            os << "\n";
        }
        os << "result=" << (pass() ? "pass" : "fail") << "\n";
        return os.str();
    }
};

//! The proof document for a provable proposition: opaque bytes derived from
//! the proposition name.
inline std::vector<std::uint8_t> scenario_proof_payload(const std::string& prop_name) {
    Digest32 d = sha256("proof-of:" + prop_name);
    return std::vector<std::uint8_t>(d.begin(), d.end());
}

inline Report run_scenario(const Scenario& sc,
                           std::optional<std::uint64_t> seed_override = std::nullopt) {
    validate_scenario(sc);
    std::uint64_t seed = seed_override.value_or(sc.seed);
    Harness h(seed);

    for (const ScenarioProp& p : sc.props)
        if (p.provable) h.oracle().add(proposition_id(p.name), scenario_proof_payload(p.name));
    for (const ScenarioActor& a : sc.actors) h.add_actor(a.name, a.policy);
    for (const auto& [who, amount] : sc.funds) h.faucet(who, amount);
    for (const ScenarioChannel& c : sc.channels)
        h.declare_channel(c.id, c.party_a, c.party_b, c.contrib_a, c.contrib_b, c.csv);

    bool all_live = true;
    bool finished = false;
    auto run_one = [&](const Directive& d) {
        switch (d.kind) {
            case Directive::Kind::Open: h.open(d.chan); break;
            case Directive::Kind::Pay: h.pay(d.chan, d.actor, d.amount); break;
            case Directive::Kind::Bet: {
                std::uint32_t deadline = d.relative ? h.chain().height() + d.height : d.height;
                h.bet(d.chan, d.actor, d.amount, d.amount2, d.prop, deadline);
                break;
            }
            case Directive::Kind::Reveal: h.give_proof(d.actor, d.prop); break;
            case Directive::Kind::Register: h.register_proof(d.prop); break;
            case Directive::Kind::Settle: h.settle(d.chan, d.prop, d.actor); break;
            case Directive::Kind::Close: h.close(d.chan); break;
            case Directive::Kind::CloseUnilateral: h.close_unilateral(d.chan, d.actor); break;
            case Directive::Kind::Advance: h.advance(d.number); break;
            case Directive::Kind::Route: h.route(d.amount, d.chans, d.fees); break;
            case Directive::Kind::Hedge: h.hedge(d.chan, d.chan2, d.prop); break;
            case Directive::Kind::Drop: h.fault_drop(d.msg, d.from, d.to, d.number); break;
            case Directive::Kind::Silence: h.fault_silence(d.actor); break;
            case Directive::Kind::Withhold: h.fault_withhold(d.actor); break;
            case Directive::Kind::PublishRevoked:
                h.fault_publish_revoked(d.actor, d.chan, d.number);
                break;
            case Directive::Kind::Finish:
                all_live = h.finish(d.number ? d.number : 400) && all_live;
                finished = true;
                break;
        }
    };
    for (const Directive& d : sc.script) {
        try {
            run_one(d);
        } catch (const std::exception& e) {
            throw ScenarioError("line " + std::to_string(d.line) + ": directive failed: " +
                                e.what());
        }
    }
    // Always run the simulation out, whether or not the script said to.
    if (!finished) all_live = h.finish(400) && all_live;

    // A faulted party's view can lag (a silenced actor never sees the close),
    // so report whichever side's state has progressed further.
    auto resolved_state = [&](const ScenarioChannel& c) -> const ChannelState& {
        const ChannelState& sa = h.actor(c.party_a).channels.at(c.id).state;
        const ChannelState& sb = h.actor(c.party_b).channels.at(c.id).state;
        return static_cast<int>(sb.status()) > static_cast<int>(sa.status()) ? sb : sa;
    };

    Report r;
    r.scenario = sc.name;
    r.seed = seed;
    for (const ScenarioActor& a : sc.actors) r.holdings.emplace_back(a.name, h.holdings(a.name));
    for (const ScenarioChannel& c : sc.channels) {
        const ChannelState& s = resolved_state(c);
        r.statuses.emplace_back(c.id, channel_status_name(s.status()), s.revision());
    }
    r.probability_lines = h.probability_lines();
    r.event_log = h.log_lines();

    std::string audit_why;
    bool audit_ok = h.chain().audit(&audit_why);
    r.checks.push_back({"chain-audit", audit_ok, audit_why});

    bool conserved = h.chain().total_live() + h.chain().burned() == h.chain().minted();
    r.checks.push_back({"conservation", conserved,
                        conserved ? "" : "live+burned differs from minted"});

    r.checks.push_back({"liveness", all_live, all_live ? "" : "round budget exhausted"});

    bool expectations_ok = true;
    std::string mismatch;
    for (const auto& [who, want] : sc.expected_holdings) {
        Amount got = h.holdings(who);
        if (got != want) {
            expectations_ok = false;
            mismatch += (mismatch.empty() ? "" : ";") + who + "=" + got.to_bars_string() +
                        "(want " + want.to_bars_string() + ")";
        }
    }
    for (const auto& [chan, want] : sc.expected_statuses) {
        const ScenarioChannel* decl = nullptr;
        for (const ScenarioChannel& c : sc.channels)
            if (c.id == chan) decl = &c;
        std::string got = channel_status_name(resolved_state(*decl).status());
        if (got != want) {
            expectations_ok = false;
            mismatch += (mismatch.empty() ? "" : ";") + chan + "=" + got + "(want " + want + ")";
        }
    }
    if (!sc.expected_holdings.empty() || !sc.expected_statuses.empty())
        r.checks.push_back({"expectations", expectations_ok, mismatch});

    return r;
}

// ---- the builtin corpus ----

struct BuiltinScenario {
    const char* name;
    const char* summary;
    const char* text;
};

inline const std::vector<BuiltinScenario>& builtin_scenarios() {
    static const std::vector<BuiltinScenario> corpus = {
        {"open-close", "Fund and open a channel over the wire, then close it cooperatively",
         R"(scenario open-close
summary Fund and open a channel over the wire, then close it cooperatively
seed 7
actor alice honest
actor bob honest
funds alice 100
funds bob 100
channel ab alice bob 100 100

open ab
close ab
expect alice 100
expect bob 100
expect-status ab ClosedCooperative
)"},
        {"pay-update", "Shift balances back and forth through signed revisions",
         R"(scenario pay-update
summary Shift balances back and forth through signed revisions
seed 7
actor alice honest
actor bob honest
funds alice 100
funds bob 100
channel ab alice bob 100 100

open ab
pay ab alice 0.1
pay ab bob 25.1
close ab
expect alice 125
expect bob 75
expect-status ab ClosedCooperative
)"},
        {"bet-settle-cooperative", "A bet settles off-chain for the backer once the proof appears",
         R"(scenario bet-settle-cooperative
summary A bet settles off-chain for the backer once the proof appears
seed 7
actor alice honest
actor bob honest
funds alice 100
funds bob 100
prop P provable
channel ab alice bob 100 100

open ab
bet ab alice 50 10 P +100
reveal bob P
close ab
expect alice 50
expect bob 150
expect-status ab ClosedCooperative
)"},
        {"bet-timeout", "No proof by the deadline: the doubter collects the pot off-chain",
         R"(scenario bet-timeout
summary No proof by the deadline: the doubter collects the pot off-chain
seed 7
actor alice honest
actor bob honest
funds alice 100
funds bob 100
prop Q unprovable
channel ab alice bob 100 100

open ab
bet ab alice 50 10 Q +20
advance 22
close ab
expect alice 110
expect bob 90
expect-status ab ClosedCooperative
)"},
        {"bet-onchain-backer", "An unresponsive doubter forces the backer to claim on chain",
         R"(scenario bet-onchain-backer
summary An unresponsive doubter forces the backer to claim on chain
seed 7
actor alice honest
actor bob honest
funds alice 100
funds bob 100
prop P provable
channel ab alice bob 100 100

open ab
bet ab alice 50 10 P +60
silence alice
reveal bob P
expect alice 50
expect bob 150
expect-status ab ClosedUnilateral
)"},
        {"bet-onchain-doubter", "An unresponsive backer forces the doubter to the timeout path",
         R"(scenario bet-onchain-doubter
summary An unresponsive backer forces the doubter to the timeout path
seed 7
actor alice honest
actor bob honest
funds alice 100
funds bob 100
prop Q unprovable
channel ab alice bob 100 100

open ab
bet ab alice 50 10 Q +20
silence bob
expect alice 110
expect bob 90
expect-status ab ClosedUnilateral
)"},
        {"race-window", "Proof registered inside the deadline-to-timeout window wins the claim race",
         R"(scenario race-window
summary Proof registered inside the deadline-to-timeout window wins the claim race
seed 7
actor alice honest
actor bob honest
funds alice 100
funds bob 100
prop P provable
channel ab alice bob 100 100

open ab
bet ab alice 50 10 P +30
close-unilateral ab bob
advance 40
register P
expect alice 50
expect bob 150
expect-status ab ClosedUnilateral
)"},
        {"breach-punish", "Publishing a revoked revision costs the cheater the whole capacity",
         R"(scenario breach-punish
summary Publishing a revoked revision costs the cheater the whole capacity
seed 7
actor alice honest
actor bob cheater rev=2
funds alice 100
funds bob 100
channel ab alice bob 100 100

open ab
pay ab alice 10
pay ab bob 30
close ab
expect alice 200
expect bob 0
expect-status ab Breached
)"},
        {"htlc-race", "A payee publishes and wins the htlc output with the secret",
         R"(scenario htlc-race
summary A payee publishes and wins the htlc output with the secret
seed 7
actor alice honest
actor bob honest
funds alice 100
funds bob 100
channel ab alice bob 100 100

open ab
drop HtlcSettle bob alice 1
route 10 ab
expect alice 90
expect bob 110
expect-status ab ClosedUnilateral
)"},
        {"route-payment", "A payment crosses two channels; the middle hop keeps its fee",
         R"(scenario route-payment
summary A payment crosses two channels; the middle hop keeps its fee
seed 7
actor alice honest
actor bob honest
actor charlie honest
funds alice 100
funds bob 200
funds charlie 100
channel ab alice bob 100 100
channel bc bob charlie 100 100

open ab
open bc
route 10 ab bc fees 1
close ab
close bc
expect alice 89
expect bob 201
expect charlie 110
expect-status ab ClosedCooperative
expect-status bc ClosedCooperative
)"},
        {"three-party-hedge-noproof", "A hedged middle actor stays flat when no proof appears",
         R"(scenario three-party-hedge-noproof
summary A hedged middle actor stays flat when no proof appears
seed 7
actor alice honest
actor bob honest
actor charlie honest
funds alice 100
funds bob 200
funds charlie 100
prop Q unprovable
channel ab alice bob 100 100
channel bc bob charlie 100 100

open ab
open bc
bet ab alice 50 10 Q +10
hedge ab bc Q
advance 12
close ab
close bc
expect alice 110
expect bob 200
expect charlie 90
expect-status ab ClosedCooperative
expect-status bc ClosedCooperative
)"},
        {"three-party-hedge-proof", "A hedged middle actor stays flat when the proof appears",
         R"(scenario three-party-hedge-proof
summary A hedged middle actor stays flat when the proof appears
seed 7
actor alice honest
actor bob honest
actor charlie honest
funds alice 100
funds bob 200
funds charlie 100
prop P provable
channel ab alice bob 100 100
channel bc bob charlie 100 100

open ab
open bc
bet ab alice 50 10 P +100
hedge ab bc P
reveal charlie P
close ab
close bc
expect alice 50
expect bob 200
expect charlie 150
expect-status ab ClosedCooperative
expect-status bc ClosedCooperative
)"},
        {"middleman-withhold", "A middleman withholding a relayed proof gains nothing by it",
         R"(scenario middleman-withhold
summary A middleman withholding a relayed proof gains nothing by it
seed 7
actor alice honest
actor bob honest
actor charlie honest
funds alice 100
funds bob 200
funds charlie 100
prop P provable
channel ab alice bob 100 100
channel bc bob charlie 100 100

open ab
open bc
bet ab alice 50 10 P +60
hedge ab bc P
withhold bob
reveal charlie P
finish 200
close bc
expect alice 50
expect bob 200
expect charlie 150
expect-status ab ClosedUnilateral
expect-status bc ClosedCooperative
)"},
        {"probability-report", "Bet odds are reported as implied probabilities",
         R"(scenario probability-report
summary Bet odds are reported as implied probabilities
seed 7
actor alice honest
actor bob honest
funds alice 100
funds bob 100
prop P provable
prop R provable
channel ab alice bob 100 100

open ab
bet ab alice 50 10 P +100
bet ab alice 25 25 R +120
reveal bob P
reveal bob R
close ab
expect alice 25
expect bob 175
expect-status ab ClosedCooperative
)"},
    };
    return corpus;
}

inline const BuiltinScenario* find_builtin(const std::string& name) {
    for (const BuiltinScenario& b : builtin_scenarios())
        if (b.name == name) return &b;
    return nullptr;
}

} // namespace pfc

#endif // PROOFCHANNELS_SCENARIO_HPP
