#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "campus/agents.hpp"
#include "campus/http_server.hpp"
#include "campus/service.hpp"
#include "campus/snapshot.hpp"

// After the project headers: <resolv.h> defines a _res macro that clashes with Eigen.
#include <httplib.h>

using namespace campus;
using namespace campus::service;
using namespace std::chrono_literals;

namespace {

struct Fixture {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  std::unique_ptr<SessionService> svc;

  explicit Fixture(std::optional<std::filesystem::path> data_dir = std::nullopt) {
    ServiceOptions o;
    o.clock = clock;
    o.data_dir = std::move(data_dir);
    svc = std::make_unique<SessionService>(o);
  }

  Created create(std::uint64_t seed = 5, json config = json::object()) {
    CreateRequest r;
    r.seed = seed;
    r.config = std::move(config);
    return svc->create_session(r);
  }
};

ordered_json without_id(ordered_json snap) {
  snap.erase("session_id");
  return snap;
}

int error_status(const std::function<void()>& f, std::string* code = nullptr) {
  try {
    f();
  } catch (const ServiceError& e) {
    if (code) *code = e.code();
    return e.status();
  }
  return 0;
}

// Drives a service session to completion with the oracle, mirroring it locally.
void complete_with_oracle(SessionService& svc, const std::string& id, std::uint64_t seed) {
  auto mirror = engine::new_session({std::shared_ptr<const world::WorldDef>{}, &world::default_world()}, {}, seed, id);
  agents::Policy oracle;
  Rng rng(0);
  std::vector<engine::Event> events;
  while (!mirror.finished()) {
    const auto a = agents::choose_action(oracle, mirror, rng);
    ASSERT_TRUE(a.has_value());
    engine::apply_action_in_place(mirror, *a, events);
    const auto snap = svc.submit_action(id, engine::action_to_json(*a));
    ASSERT_EQ(snap, snapshot::make_snapshot(mirror));
  }
}

std::vector<std::string> barrier_texts() {
  std::vector<std::string> out;
  for (const auto& s : world::default_world().signs) {
    if (s.barrier != text::BarrierKind::None) out.push_back(s.base_text);
  }
  return out;
}

json survey_answers(int likert = 3) {
  json a = {{"gender", "other"}, {"age", "26-50"}, {"relationship", "none"}};
  for (const auto& q : survey::Instrument::bundled().questions) {
    if (q.kind == survey::AnswerKind::Likert) a[q.id] = likert;
  }
  return a;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("campus-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(CreateSession, DefaultsGiveTutorialSnapshot) {
  Fixture f;
  const auto c = f.svc->create_session({});
  EXPECT_EQ(c.snapshot["stage"], "tutorial");
  EXPECT_EQ(c.snapshot["help_uses"], 0);
  EXPECT_EQ(c.snapshot["position"]["node"], "gate");
  EXPECT_EQ(c.snapshot["session_id"], c.session_id);
  EXPECT_EQ(c.session_id.rfind("s-", 0), 0u);
}

TEST(CreateSession, RejectsBadConfigAndWorld) {
  Fixture f;
  std::string code;
  EXPECT_EQ(error_status([&] { f.create(1, {{"misdirection_rate", 1.5}}); }, &code), 400);
  EXPECT_EQ(code, "invalid-config");
  CreateRequest r;
  r.world = "moon";
  EXPECT_EQ(error_status([&] { f.svc->create_session(r); }, &code), 404);
  EXPECT_EQ(code, "unknown-world");
}

TEST(CreateSession, FixedSeedIsReproducible) {
  Fixture f;
  const auto a = f.create(77);
  const auto b = f.create(77);
  EXPECT_NE(a.session_id, b.session_id);
  EXPECT_EQ(without_id(a.snapshot), without_id(b.snapshot));
  for (const auto& body : {json{{"type", "move-step"}, {"to", "c03"}}, json{{"type", "request-help"}, {"map", "campus-map"}},
                           json{{"type", "move-step"}, {"direction", "north"}}}) {
    EXPECT_EQ(without_id(f.svc->submit_action(a.session_id, body)), without_id(f.svc->submit_action(b.session_id, body)));
  }
  f.clock->advance(7s);
  EXPECT_EQ(without_id(f.svc->get_state(a.session_id)), without_id(f.svc->get_state(b.session_id)));
}

TEST(CreateSession, ClientIdReplacesPreviousSession) {
  Fixture f;
  CreateRequest r;
  r.client_id = "tab-1";
  const auto first = f.svc->create_session(r);
  const auto second = f.svc->create_session(r);
  EXPECT_EQ(error_status([&] { f.svc->get_state(first.session_id); }), 404);
  EXPECT_NO_THROW(f.svc->get_state(second.session_id));
  EXPECT_EQ(f.svc->list_sessions().size(), 1u);
}

TEST(SubmitAction, PressButtonStartsJourney) {
  Fixture f;
  const auto id = f.create().session_id;
  f.svc->submit_action(id, {{"type", "move-step"}, {"to", "c03"}});
  f.svc->submit_action(id, {{"type", "move-step"}, {"to", "c13"}});
  const auto snap = f.svc->submit_action(id, {{"type", "press-button"}, {"button", "tutorial-map"}});
  EXPECT_EQ(snap["stage"], "journey-1");
}

TEST(SubmitAction, GrabOutsideTaskIsIllegal) {
  Fixture f;
  const auto id = f.create().session_id;
  try {
    f.svc->submit_action(id, {{"type", "grab"}, {"item", "notebook"}});
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.status(), 409);
    EXPECT_EQ(e.code(), "illegal-action");
    EXPECT_FALSE(e.details().at("constraint").get<std::string>().empty());
    EXPECT_EQ(e.to_json()["error"], "illegal-action");
  }
}

TEST(SubmitAction, MalformedAndUnknown) {
  Fixture f;
  const auto id = f.create().session_id;
  std::string code;
  EXPECT_EQ(error_status([&] { f.svc->submit_action(id, {{"type", "fly"}}); }, &code), 400);
  EXPECT_EQ(code, "bad-action");
  EXPECT_EQ(error_status([&] { f.svc->submit_action(id, {{"type", "grab"}, {"item", "laptop"}}); }, &code), 400);
  EXPECT_EQ(code, "unknown-id");
  EXPECT_EQ(error_status([&] { f.svc->get_state("s-nope"); }, &code), 404);
  EXPECT_EQ(code, "unknown-session");
}

TEST(SubmitAction, RequestHelpShowsArrow) {
  Fixture f;
  const auto id = f.create().session_id;
  const auto snap = f.svc->submit_action(id, {{"type", "request-help"}, {"map", "campus-map"}});
  EXPECT_EQ(snap["help_uses"], 1);
  ASSERT_FALSE(snap["arrow"].is_null());
  EXPECT_EQ(snap["arrow"]["from"]["node"], "gate");
}

TEST(Authority, ServerStateMatchesEngine) {
  Fixture f;
  const auto c = f.create(12);
  complete_with_oracle(*f.svc, c.session_id, 12);
  EXPECT_EQ(f.svc->get_state(c.session_id)["stage"], "completed");
  EXPECT_EQ(f.svc->get_state(c.session_id)["outcome"], "completed");
}

TEST(Authority, ReadsAreIdempotent) {
  Fixture f;
  const auto id = f.create().session_id;
  f.clock->advance(3s);
  const auto a = f.svc->get_state(id);
  const auto before = f.svc->deltas_since(id, 0).size();
  const auto b = f.svc->get_state(id);
  EXPECT_EQ(a, b);
  EXPECT_EQ(f.svc->deltas_since(id, 0).size(), before);
  EXPECT_EQ(f.svc->event_log(id), f.svc->event_log(id));
}

TEST(Authority, ClockDrivesTicks) {
  Fixture f;
  const auto id = f.create().session_id;
  f.clock->advance(2500ms);
  EXPECT_EQ(f.svc->get_state(id)["tick"], 25);
}

TEST(Streaming, DeltaPerCadenceWindowNearLetterSign) {
  Fixture f;
  const auto id = f.create().session_id;
  f.svc->submit_action(id, {{"type", "move-step"}, {"to", "c03"}});
  f.svc->submit_action(id, {{"type", "move-step"}, {"to", "c13"}});
  f.svc->submit_action(id, {{"type", "press-button"}, {"button", "tutorial-map"}});
  const auto last = f.svc->deltas_since(id, 0).back().seq;
  f.clock->advance(6s);
  const auto deltas = f.svc->deltas_since(id, last);
  ASSERT_GE(deltas.size(), 3u);
  std::set<std::string> texts;
  for (const auto& d : deltas) {
    EXPECT_GT(d.seq, last);
    for (const auto& s : d.snapshot["visible_signs"]) {
      if (s["id"] == "sign-journey1") texts.insert(s["text"].get<std::string>());
    }
  }
  EXPECT_GE(texts.size(), 2u);
}

TEST(Streaming, SubscribersSeeIdenticalSequences) {
  Fixture f;
  const auto id = f.create().session_id;
  f.svc->submit_action(id, {{"type", "move-step"}, {"to", "c03"}});
  f.clock->advance(9s);
  const auto a = f.svc->deltas_since(id, 0);
  const auto b = f.svc->deltas_since(id, 0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(delta_to_json(a[i]), delta_to_json(b[i]));
    if (i > 0) {
      EXPECT_EQ(a[i].seq, a[i - 1].seq + 1);
    }
  }
}

TEST(Streaming, SingleTerminalDelta) {
  Fixture f;
  const auto id = f.create(4).session_id;
  complete_with_oracle(*f.svc, id, 4);
  f.clock->advance(10s);
  const auto deltas = f.svc->deltas_since(id, 0);
  int terminal = 0;
  for (const auto& d : deltas) terminal += d.terminal;
  EXPECT_EQ(terminal, 1);
  EXPECT_TRUE(deltas.back().terminal);
  EXPECT_EQ(deltas.back().snapshot["stage"], "completed");
  std::string code;
  EXPECT_EQ(error_status([&] { f.svc->submit_action(id, {{"type", "exit-building"}}); }, &code), 409);
}

TEST(Streaming, WaitTimesOutWithoutNews) {
  Fixture f;
  const auto id = f.create().session_id;
  const auto last = f.svc->deltas_since(id, 0).back().seq;
  EXPECT_TRUE(f.svc->wait_deltas(id, last, 30ms).empty());
}

TEST(Opacity, JourneySnapshotsHideBarrierText) {
  Fixture f;
  const auto id = f.create().session_id;
  f.svc->submit_action(id, {{"type", "move-step"}, {"to", "c03"}});
  f.svc->submit_action(id, {{"type", "move-step"}, {"to", "c13"}});
  f.svc->submit_action(id, {{"type", "press-button"}, {"button", "tutorial-map"}});
  for (int i = 0; i < 60; ++i) {
    f.clock->advance(1s);
    const auto dump = f.svc->get_state(id).dump();
    for (const auto& t : barrier_texts()) EXPECT_EQ(dump.find(t), std::string::npos) << t;
  }
  const auto layout = f.svc->world_layout("default").dump();
  for (const auto& t : barrier_texts()) EXPECT_EQ(layout.find(t), std::string::npos);
}

TEST(Survey, AcceptRejectAndDuplicate) {
  Fixture f;
  const auto id = f.create().session_id;
  EXPECT_EQ(f.svc->submit_survey(id, survey_answers())["accepted"], true);
  try {
    f.svc->submit_survey(std::nullopt, survey_answers(0));
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.status(), 422);
    EXPECT_EQ(e.code(), "invalid-survey");
    EXPECT_GE(e.details()["issues"].size(), 1u);
  }
  std::string code;
  EXPECT_EQ(error_status([&] { f.svc->submit_survey(id, survey_answers()); }, &code), 409);
  EXPECT_EQ(code, "duplicate-survey");
  EXPECT_EQ(f.svc->survey_responses().size(), 1u);
}

TEST(Survey, PersistsAcrossRestart) {
  const auto dir = temp_dir("survey");
  {
    Fixture f(dir);
    f.svc->submit_survey("s-a", survey_answers(2));
    f.svc->submit_survey(std::nullopt, survey_answers(5));
  }
  Fixture g(dir);
  ASSERT_EQ(g.svc->survey_responses().size(), 2u);
  EXPECT_EQ(g.svc->survey_responses()[0].session_id, "s-a");
  EXPECT_EQ(error_status([&] { g.svc->submit_survey("s-a", survey_answers()); }), 409);
  std::filesystem::remove_all(dir);
}

TEST(Sessions, LogPersistedOnCompletion) {
  const auto dir = temp_dir("logs");
  Fixture f(dir);
  const auto id = f.create(8).session_id;
  complete_with_oracle(*f.svc, id, 8);
  const auto path = dir / "sessions" / (id + ".ndjson");
  ASSERT_TRUE(std::filesystem::exists(path));
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), f.svc->event_log(id));
  const auto log = engine::EventLog::from_ndjson(buf.str());
  const auto again = engine::replay({std::shared_ptr<const world::WorldDef>{}, &world::default_world()}, {}, 8,
                                    engine::trace_from_log(log), id);
  EXPECT_EQ(again.digest(), log.digest());
  std::filesystem::remove_all(dir);
}

TEST(Sessions, IdleSessionsAreReaped) {
  Fixture f;
  const auto id = f.create().session_id;
  f.clock->advance(31min);
  EXPECT_EQ(f.svc->reap_idle(), 1u);
  EXPECT_EQ(error_status([&] { f.svc->get_state(id); }), 404);
}

TEST(Http, EndToEnd) {
  auto clock = std::make_shared<ManualClock>();
  ServiceOptions o;
  o.clock = clock;
  auto svc = std::make_shared<SessionService>(o);
  http::Server server(svc, {"127.0.0.1", 0, std::nullopt});
  const int port = server.bind();
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  struct Joiner {
    http::Server& server;
    std::thread& thread;
    ~Joiner() {
      server.stop();
      thread.join();
    }
  } joiner{server, t};

  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Post("/api/sessions", R"({"seed": 5})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  const auto created = json::parse(res->body);
  const std::string id = created["session_id"];
  EXPECT_EQ(created["snapshot"]["stage"], "tutorial");

  res = cli.Post("/api/sessions/" + id + "/actions", R"({"type":"move-step","to":"c03"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["position"]["node"], "c03");

  res = cli.Post("/api/sessions/" + id + "/actions", R"({"type":"grab","item":"pen"})", "application/json");
  EXPECT_EQ(res->status, 409);
  EXPECT_EQ(json::parse(res->body)["error"], "illegal-action");

  res = cli.Post("/api/sessions/" + id + "/actions", "{not json", "application/json");
  EXPECT_EQ(res->status, 400);

  res = cli.Get("/api/sessions/" + id + "/deltas?after=0");
  ASSERT_TRUE(res);
  const auto deltas = json::parse(res->body)["deltas"];
  ASSERT_EQ(deltas.size(), 2u);  // creation, then the move
  EXPECT_EQ(deltas[1]["snapshot"]["position"]["node"], "c03");

  res = cli.Get("/api/sessions/s-missing");
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(json::parse(res->body)["error"], "unknown-session");

  res = cli.Get("/api/survey/instrument");
  EXPECT_EQ(json::parse(res->body)["questions"].size(), 15u);

  json survey{{"session_id", id}, {"answers", survey_answers()}};
  res = cli.Post("/api/survey", survey.dump(), "application/json");
  EXPECT_EQ(res->status, 201);
  res = cli.Post("/api/survey", survey.dump(), "application/json");
  EXPECT_EQ(res->status, 409);

  res = cli.Get("/api/admin/sessions");
  EXPECT_EQ(json::parse(res->body)["sessions"].size(), 1u);

  res = cli.Get("/api/worlds/default/layout");
  EXPECT_EQ(json::parse(res->body)["buildings"].size(), 7u);

  res = cli.Get("/api/sessions/" + id + "/log");
  EXPECT_EQ(res->body, svc->event_log(id));

  CreateRequest second;
  second.seed = 6;
  const auto done = svc->create_session(second).session_id;
  complete_with_oracle(*svc, done, 6);
  res = cli.Get("/api/sessions/" + done + "/stream");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Content-Type"), "text/event-stream");
  std::size_t frames = 0;
  for (auto pos = res->body.find("event: delta"); pos != std::string::npos; pos = res->body.find("event: delta", pos + 1)) {
    ++frames;
  }
  EXPECT_EQ(frames, svc->deltas_since(done, 0).size());
  EXPECT_NE(res->body.find("\"terminal\":true"), std::string::npos);
}
