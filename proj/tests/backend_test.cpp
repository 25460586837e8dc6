#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "storygen/backend.hpp"
#include "storygen/errors.hpp"
#include "storygen/http_backend.hpp"
#include "storygen/scripted_backend.hpp"
#include "storygen/story.hpp"
#include "test_support.hpp"

using namespace storygen;

namespace {

ChatRequest make_request(std::string tag, std::string user = "say something") {
  ChatRequest request;
  request.role_tag = std::move(tag);
  request.system_text = "you are a test fixture";
  request.user_text = std::move(user);
  return request;
}

}  // namespace

TEST_CASE("text_digest matches the reference implementation") {
  CHECK(text_digest("") == "cbf29ce484222325");

  std::mt19937 rng(20240817);
  std::uniform_int_distribution<int> len(0, 120);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      text.push_back(static_cast<char>(byte(rng)));
    }
    CHECK(text_digest(text) == ts::to_hex16(ts::fnv1a64_reference(text)));
  }

  // Embedded NUL participates in the hash.
  CHECK(text_digest(std::string("a\0b", 3)) !=
        text_digest(std::string("ab", 2)));
}

TEST_CASE("request_digest hashes system and user text with a separator") {
  ChatRequest request = make_request("starter", "user part");
  request.system_text = "system part";
  CHECK(request_digest(request) ==
        text_digest(std::string("system part") + '\x1e' + "user part"));

  ChatRequest left = make_request("a", "b");
  left.system_text = "a";
  left.user_text = "b";
  ChatRequest right = make_request("a", "");
  right.system_text = "ab";
  right.user_text = "x";
  CHECK(request_digest(left) != request_digest(right));
}

TEST_CASE("complete rejects malformed requests before logging them") {
  ScriptedBackend backend({{"starter", "ok"}, {"starter", "ok"}});

  ChatRequest no_tag = make_request("");
  CHECK_THROWS_AS(backend.complete(no_tag), std::invalid_argument);

  ChatRequest no_user = make_request("starter", "");
  CHECK_THROWS_AS(backend.complete(no_user), std::invalid_argument);

  ChatRequest cold = make_request("starter");
  cold.temperature = -0.01;
  CHECK_THROWS_AS(backend.complete(cold), std::invalid_argument);

  ChatRequest hot = make_request("starter");
  hot.temperature = 2.01;
  CHECK_THROWS_AS(backend.complete(hot), std::invalid_argument);

  ChatRequest no_budget = make_request("starter");
  no_budget.max_tokens = 0;
  CHECK_THROWS_AS(backend.complete(no_budget), std::invalid_argument);

  CHECK(backend.call_log().empty());

  // The temperature bounds themselves are valid.
  ChatRequest floor = make_request("starter");
  floor.temperature = 0.0;
  CHECK(backend.complete(floor).text == "ok");
  ChatRequest ceiling = make_request("starter");
  ceiling.temperature = 2.0;
  CHECK(backend.complete(ceiling).text == "ok");
}

TEST_CASE("scripted entries are consumed FIFO per role tag") {
  ScriptedBackend backend({{"writer_sim", "draft one"},
                           {"reader_sim", "note one"},
                           {"writer_sim", "draft two"},
                           {"reader_sim", "note two"},
                           {"writer_sim", "draft three"}});

  CHECK(backend.complete(make_request("writer_sim")).text == "draft one");
  CHECK(backend.complete(make_request("reader_sim")).text == "note one");
  CHECK(backend.complete(make_request("reader_sim")).text == "note two");
  CHECK(backend.complete(make_request("writer_sim")).text == "draft two");
  CHECK(backend.complete(make_request("writer_sim")).text == "draft three");

  CHECK(backend.remaining("writer_sim") == 0);
  CHECK(backend.remaining("reader_sim") == 0);

  auto counts = backend.consumed_counts();
  CHECK(counts["writer_sim"] == 3);
  CHECK(counts["reader_sim"] == 2);
}

TEST_CASE("scripted responses report word-count token usage") {
  ScriptedBackend backend({{"starter", "one two  three\nfour"}});
  const auto response = backend.complete(make_request("starter"));
  CHECK(response.completion_tokens == 4);
  CHECK(response.completion_tokens ==
        ts::count_words_oracle("one two  three\nfour"));
}

TEST_CASE("captured requests preserve the exact prompt text") {
  ScriptedBackend backend({{"ender", "the end"}});
  ChatRequest request = make_request("ender", "wrap it up");
  request.system_text = "finish the story";
  backend.complete(request);

  const auto captured = backend.captured_requests();
  REQUIRE(captured.size() == 1);
  CHECK(captured[0].role_tag == "ender");
  CHECK(captured[0].system_text == "finish the story");
  CHECK(captured[0].user_text == "wrap it up");
}

TEST_CASE("an exhausted script raises and logs the failure") {
  ScriptedBackend backend({{"starter", "only one"}});
  backend.complete(make_request("starter"));
  CHECK_THROWS_AS(backend.complete(make_request("starter")), ScriptExhausted);
  CHECK_THROWS_AS(backend.complete(make_request("never_scripted")),
                  ScriptExhausted);

  const auto log = backend.call_log();
  REQUIRE(log.size() == 3);
  CHECK(log[0].ok);
  CHECK_FALSE(log[1].ok);
  CHECK_FALSE(log[2].ok);
  CHECK_FALSE(log[1].error.empty());
}

TEST_CASE("fast_forward consumes entries without logging calls") {
  ScriptedBackend backend({{"writer_sim", "first"},
                           {"writer_sim", "second"},
                           {"writer_sim", "third"},
                           {"reader_sim", "note"}});
  backend.fast_forward({{"writer_sim", 2}});

  CHECK(backend.call_log().empty());
  CHECK(backend.captured_requests().empty());
  CHECK(backend.remaining("writer_sim") == 1);
  CHECK(backend.complete(make_request("writer_sim")).text == "third");
  CHECK(backend.complete(make_request("reader_sim")).text == "note");
}

TEST_CASE("fast_forward past the script end raises ScriptExhausted") {
  ScriptedBackend backend({{"writer_sim", "only"}});
  CHECK_THROWS_AS(backend.fast_forward({{"writer_sim", 2}}), ScriptExhausted);
}

TEST_CASE("load_script rejects malformed files") {
  ts::TempDir dir;
  ts::write_file(dir / "bad.json", "this is not json");
  CHECK_THROWS_AS(load_script(dir / "bad.json"), FormatError);

  ts::write_file(dir / "object.json", "{\"role_tag\": \"a\"}");
  CHECK_THROWS_AS(load_script(dir / "object.json"), FormatError);

  CHECK_THROWS_AS(load_script(dir / "missing.json"), FormatError);

  ts::write_script_file(dir / "good.json",
                        {{"starter", "fine"}, {"ender", "done"}});
  const auto script = load_script(dir / "good.json");
  REQUIRE(script.size() == 2);
  CHECK(script[0].role_tag == "starter");
  CHECK(script[1].response == "done");
}

TEST_CASE("concurrent callers keep the log complete and per-tag order intact") {
  constexpr int kThreads = 4;
  constexpr int kCallsPerThread = 50;

  std::vector<ScriptEntry> script;
  for (int t = 0; t < kThreads; ++t) {
    for (int i = 0; i < kCallsPerThread; ++i) {
      script.push_back({"tag" + std::to_string(t),
                        "response " + std::to_string(t) + " " +
                            std::to_string(i)});
    }
  }
  ScriptedBackend backend(std::move(script));

  std::vector<std::thread> workers;
  std::vector<std::vector<std::string>> received(kThreads);
  for (int t = 0; t < kThreads; ++t) {
    workers.emplace_back([&backend, &received, t] {
      for (int i = 0; i < kCallsPerThread; ++i) {
        received[static_cast<std::size_t>(t)].push_back(
            backend.complete(make_request("tag" + std::to_string(t))).text);
      }
    });
  }
  for (auto& worker : workers) {
    worker.join();
  }

  // Each thread owns one tag, so it must see its tag's entries in order.
  for (int t = 0; t < kThreads; ++t) {
    REQUIRE(received[static_cast<std::size_t>(t)].size() ==
            static_cast<std::size_t>(kCallsPerThread));
    for (int i = 0; i < kCallsPerThread; ++i) {
      CHECK(received[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] ==
            "response " + std::to_string(t) + " " + std::to_string(i));
    }
  }

  const auto log = backend.call_log();
  CHECK(log.size() == static_cast<std::size_t>(kThreads * kCallsPerThread));
  for (const auto& entry : log) {
    CHECK(entry.ok);
  }
}

// ---------------------------------------------------------------------------
// HTTP backend against a loopback stub server

namespace {

struct StubServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  StubServer(const std::string& path, httplib::Server::Handler handler) {
    server.Post(path, std::move(handler));
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~StubServer() {
    server.stop();
    thread.join();
  }

  std::string endpoint(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port) + path;
  }
};

HttpBackendConfig stub_config(const StubServer& stub, const std::string& path,
                              WireFormat wire) {
  HttpBackendConfig config;
  config.endpoint = stub.endpoint(path);
  config.model = "unit-model";
  config.wire_format = wire;
  config.api_key = "test-key-123";
  config.max_retries = 2;
  config.backoff_base_ms = 1;
  config.timeout_seconds = 5;
  return config;
}

}  // namespace

TEST_CASE("http backend speaks the openai wire format") {
  std::string seen_auth;
  std::string seen_body;
  StubServer stub("/v1/chat/completions",
                  [&](const httplib::Request& req, httplib::Response& res) {
                    seen_auth = req.get_header_value("Authorization");
                    seen_body = req.body;
                    res.set_content(
                        nlohmann::json{
                            {"choices",
                             {{{"message", {{"content", "hello from stub"}}}}}},
                            {"usage",
                             {{"prompt_tokens", 12}, {"completion_tokens", 3}}}}
                            .dump(),
                        "application/json");
                  });

  HttpBackend backend(
      stub_config(stub, "/v1/chat/completions", WireFormat::OpenAi));
  ChatRequest request = make_request("starter", "tell me a story");
  request.system_text = "be brief";
  request.temperature = 0.25;
  request.max_tokens = 64;

  const auto response = backend.complete(request);
  CHECK(response.text == "hello from stub");
  CHECK(response.prompt_tokens == 12);
  CHECK(response.completion_tokens == 3);

  CHECK(seen_auth == "Bearer test-key-123");
  const auto body = nlohmann::json::parse(seen_body);
  const nlohmann::json expected = {
      {"model", "unit-model"},
      {"messages",
       {{{"role", "system"}, {"content", "be brief"}},
        {{"role", "user"}, {"content", "tell me a story"}}}},
      {"temperature", 0.25},
      {"max_tokens", 64}};
  CHECK(body == expected);

  const auto log = backend.call_log();
  REQUIRE(log.size() == 1);
  CHECK(log[0].ok);
  CHECK(log[0].response_digest == text_digest("hello from stub"));
}

TEST_CASE("http backend speaks the anthropic wire format") {
  std::string seen_key;
  std::string seen_version;
  std::string seen_body;
  StubServer stub("/v1/messages",
                  [&](const httplib::Request& req, httplib::Response& res) {
                    seen_key = req.get_header_value("x-api-key");
                    seen_version = req.get_header_value("anthropic-version");
                    seen_body = req.body;
                    res.set_content(
                        nlohmann::json{
                            {"content", {{{"text", "anthropic says hi"}}}},
                            {"usage",
                             {{"input_tokens", 7}, {"output_tokens", 2}}}}
                            .dump(),
                        "application/json");
                  });

  HttpBackend backend(
      stub_config(stub, "/v1/messages", WireFormat::Anthropic));
  ChatRequest request = make_request("scorer", "rate this");
  request.system_text = "you are a judge";

  const auto response = backend.complete(request);
  CHECK(response.text == "anthropic says hi");
  CHECK(response.prompt_tokens == 7);
  CHECK(response.completion_tokens == 2);

  CHECK(seen_key == "test-key-123");
  CHECK(seen_version == "2023-06-01");
  const auto body = nlohmann::json::parse(seen_body);
  CHECK(body["system"] == "you are a judge");
  REQUIRE(body["messages"].size() == 1);
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"] == "rate this");
}

TEST_CASE("retryable statuses are retried until success") {
  std::atomic<int> hits{0};
  StubServer stub("/v1/chat/completions",
                  [&](const httplib::Request&, httplib::Response& res) {
                    if (hits.fetch_add(1) == 0) {
                      res.status = 429;
                      res.set_content("slow down", "text/plain");
                      return;
                    }
                    res.set_content(
                        nlohmann::json{
                            {"choices",
                             {{{"message", {{"content", "second time"}}}}}}}
                            .dump(),
                        "application/json");
                  });

  HttpBackend backend(
      stub_config(stub, "/v1/chat/completions", WireFormat::OpenAi));
  CHECK(backend.complete(make_request("starter")).text == "second time");
  CHECK(hits.load() == 2);
}

TEST_CASE("persistent server errors exhaust the retry budget") {
  std::atomic<int> hits{0};
  StubServer stub("/v1/chat/completions",
                  [&](const httplib::Request&, httplib::Response& res) {
                    hits.fetch_add(1);
                    res.status = 500;
                    res.set_content("boom", "text/plain");
                  });

  HttpBackend backend(
      stub_config(stub, "/v1/chat/completions", WireFormat::OpenAi));
  CHECK_THROWS_WITH_AS(backend.complete(make_request("starter")),
                       doctest::Contains("gave up after 3 attempts"),
                       TransportError);
  CHECK(hits.load() == 3);
}

TEST_CASE("auth failures are terminal") {
  std::atomic<int> hits{0};
  StubServer stub("/v1/chat/completions",
                  [&](const httplib::Request&, httplib::Response& res) {
                    hits.fetch_add(1);
                    res.status = 401;
                    res.set_content("who are you", "text/plain");
                  });

  HttpBackend backend(
      stub_config(stub, "/v1/chat/completions", WireFormat::OpenAi));
  CHECK_THROWS_AS(backend.complete(make_request("starter")), AuthError);
  CHECK(hits.load() == 1);
}

TEST_CASE("non-retryable client errors fail without retry") {
  std::atomic<int> hits{0};
  StubServer stub("/v1/chat/completions",
                  [&](const httplib::Request&, httplib::Response& res) {
                    hits.fetch_add(1);
                    res.status = 400;
                    res.set_content("bad request body", "text/plain");
                  });

  HttpBackend backend(
      stub_config(stub, "/v1/chat/completions", WireFormat::OpenAi));
  CHECK_THROWS_WITH_AS(backend.complete(make_request("starter")),
                       doctest::Contains("HTTP 400"), TransportError);
  CHECK(hits.load() == 1);
}

TEST_CASE("unparseable success bodies raise ParseError with the raw body") {
  std::atomic<int> hits{0};
  StubServer stub("/v1/chat/completions",
                  [&](const httplib::Request&, httplib::Response& res) {
                    hits.fetch_add(1);
                    res.set_content("not json at all", "text/plain");
                  });

  HttpBackend backend(
      stub_config(stub, "/v1/chat/completions", WireFormat::OpenAi));
  try {
    backend.complete(make_request("starter"));
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(ex.raw_response() == "not json at all");
  }
  CHECK(hits.load() == 1);

  // Valid JSON with the wrong shape is also a parse failure, not a retry.
  hits.store(0);
  StubServer shape("/v1/other",
                   [&](const httplib::Request&, httplib::Response& res) {
                     hits.fetch_add(1);
                     res.set_content("{\"choices\": []}", "application/json");
                   });
  HttpBackend shaped(stub_config(shape, "/v1/other", WireFormat::OpenAi));
  CHECK_THROWS_AS(shaped.complete(make_request("starter")), ParseError);
  CHECK(hits.load() == 1);
}

TEST_CASE("a missing api key fails before any request is sent") {
  std::atomic<int> hits{0};
  StubServer stub("/v1/chat/completions",
                  [&](const httplib::Request&, httplib::Response& res) {
                    hits.fetch_add(1);
                    res.set_content("{}", "application/json");
                  });

  auto config = stub_config(stub, "/v1/chat/completions", WireFormat::OpenAi);
  config.api_key.clear();
  config.api_key_env = "STORYGEN_TEST_ABSENT_KEY_VAR";
  ::unsetenv("STORYGEN_TEST_ABSENT_KEY_VAR");

  HttpBackend backend(std::move(config));
  CHECK(backend.resolved_api_key().empty());
  CHECK_THROWS_WITH_AS(backend.complete(make_request("starter")),
                       doctest::Contains("STORYGEN_TEST_ABSENT_KEY_VAR"),
                       AuthError);
  CHECK(hits.load() == 0);
}

TEST_CASE("the api key can come from the configured environment variable") {
  std::string seen_auth;
  StubServer stub("/v1/chat/completions",
                  [&](const httplib::Request& req, httplib::Response& res) {
                    seen_auth = req.get_header_value("Authorization");
                    res.set_content(
                        nlohmann::json{
                            {"choices",
                             {{{"message", {{"content", "ok"}}}}}}}
                            .dump(),
                        "application/json");
                  });

  auto config = stub_config(stub, "/v1/chat/completions", WireFormat::OpenAi);
  config.api_key.clear();
  config.api_key_env = "STORYGEN_TEST_ENV_KEY_VAR";
  ::setenv("STORYGEN_TEST_ENV_KEY_VAR", "env-key-456", 1);

  HttpBackend backend(std::move(config));
  CHECK(backend.complete(make_request("starter")).text == "ok");
  CHECK(seen_auth == "Bearer env-key-456");
  ::unsetenv("STORYGEN_TEST_ENV_KEY_VAR");
}
