#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ipts/compare.hpp"
#include "ipts/embedding.hpp"
#include "ipts/error.hpp"
#include "ipts/metrics.hpp"

using namespace ipts;
using json = nlohmann::json;

namespace {

// Local server on an ephemeral port, stopped on scope exit.
class TestServer {
public:
    TestServer() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~TestServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Server& server() { return server_; }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

// Vector for a text: (length, first byte, 1).
std::vector<double> fake_vector(const std::string& t) {
    return {static_cast<double>(t.size()), t.empty() ? 0.0 : static_cast<double>(t[0]), 1.0};
}

// A port nothing listens on: bound once to learn it, then closed.
int free_port() {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    ::close(fd);
    return ntohs(addr.sin_port);
}

}  // namespace

TEST_CASE("embed endpoint batches and keeps order") {
    TestServer srv;
    std::atomic<int> calls{0};
    std::mutex mu;
    std::vector<std::size_t> batch_sizes;
    srv.server().Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        const auto body = json::parse(req.body);
        json vectors = json::array();
        for (const auto& t : body.at("texts")) vectors.push_back(fake_vector(t.get<std::string>()));
        {
            std::lock_guard lock(mu);
            batch_sizes.push_back(body.at("texts").size());
        }
        // out-of-order completion across batches
        if (body.at("texts")[0].get<std::string>() == "t0") std::this_thread::sleep_for(std::chrono::milliseconds(30));
        res.set_content(json{{"vectors", vectors}}.dump(), "application/json");
    });
    HttpProviderConfig cfg;
    cfg.url = srv.url() + "/";
    cfg.batch_size = 3;
    cfg.max_in_flight = 2;
    cfg.expected_dimension = 3;
    HttpProvider provider(cfg);
    std::vector<TextItem> items;
    for (int i = 0; i < 8; ++i) items.push_back({"k" + std::to_string(i), "t" + std::to_string(i) + std::string(i, 'x')});
    const auto out = provider.embed(items);
    REQUIRE(out.size() == 8);
    for (std::size_t i = 0; i < items.size(); ++i) CHECK(out[i] == fake_vector(items[i].text));
    CHECK(calls == 3);
    std::sort(batch_sizes.begin(), batch_sizes.end());
    CHECK(batch_sizes == std::vector<std::size_t>{2, 3, 3});

    const auto store = embed_texts(provider, items);
    CHECK(store.size() == 8);
    CHECK(store.dimension() == 3u);
}

TEST_CASE("embed endpoint dimension mismatch and bad replies") {
    TestServer srv;
    srv.server().Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        json vectors = json::array();
        for (const auto& t : body.at("texts")) {
            const auto s = t.get<std::string>();
            if (s == "short") vectors.push_back({1.0});
            else if (s == "count") continue;
            else vectors.push_back(fake_vector(s));
        }
        if (body.at("texts")[0] == "boom") {
            res.status = 500;
            return;
        }
        res.set_content(json{{"vectors", vectors}}.dump(), "application/json");
    });
    HttpProviderConfig cfg;
    cfg.url = srv.url();
    cfg.expected_dimension = 3;
    HttpProvider provider(cfg);
    const std::vector<TextItem> a = {{"a", "fine"}, {"b", "short"}};
    CHECK_THROWS_AS(provider.embed(a), Error);
    const std::vector<TextItem> b = {{"a", "fine"}, {"b", "count"}};
    CHECK_THROWS_AS(provider.embed(b), Error);
    const std::vector<TextItem> c = {{"a", "boom"}};
    CHECK_THROWS_AS(provider.embed(c), Error);

    HttpProviderConfig wrong = cfg;
    wrong.expected_dimension = 4;
    HttpProvider strict(wrong);
    const std::vector<TextItem> d = {{"a", "fine"}};
    CHECK_THROWS_AS(strict.embed(d), Error);
}

TEST_CASE("score endpoint") {
    TestServer srv;
    srv.server().Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        json scores = json::array();
        for (const auto& t : body.at("texts")) {
            const auto s = t.get<std::string>();
            if (s == "bad") scores.push_back({{"formality", 1.5}});
            else scores.push_back({{"formality", 0.25}, {"empathy", s.size() / 10.0}});
        }
        res.set_content(json{{"scores", scores}}.dump(), "application/json");
    });
    HttpScoreProvider provider(srv.url(), 2);
    const std::vector<TextItem> items = {{"a", "hey"}, {"b", "hello"}, {"c", "x"}};
    const auto s = external_scores(items, provider);
    CHECK(s.at("a").formality == 0.25);
    CHECK(s.at("b").empathy == doctest::Approx(0.5));
    CHECK(s.at("c").empathy == doctest::Approx(0.1));
    const std::vector<TextItem> bad = {{"zz", "bad"}};
    try {
        external_scores(bad, provider);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK((std::string(e.what()) + e.context()).find("zz") != std::string::npos);
    }
}

TEST_CASE("chat endpoint does not retry HTTP errors") {
    TestServer srv;
    std::atomic<int> calls{0};
    srv.server().Post("/chat", [&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        const auto body = json::parse(req.body);
        if (body.at("prompt") == "fail") {
            res.status = 503;
            return;
        }
        res.set_content(json{{"text", "re: " + body.at("prompt").get<std::string>()}}.dump(), "application/json");
    });
    HttpChatConfig cfg;
    cfg.url = srv.url();
    cfg.initial_backoff_ms = 1;
    HttpChatProvider chat(cfg);
    CHECK(chat.complete("hello") == "re: hello");
    calls = 0;
    CHECK_THROWS_AS(chat.complete("fail"), Error);
    CHECK(calls == 1);

    std::vector<PromptRequest> reqs;
    for (int i = 0; i < 6; ++i) reqs.push_back({"p" + std::to_string(i), PromptTier::AI1, "q" + std::to_string(i)});
    const auto set = collect_responses(reqs, chat, 3);
    CHECK(set.responses.size() == 6);
    CHECK(set.responses.at({"p4", PromptTier::AI1}) == "re: q4");
    CHECK(set.empty.empty());
}

TEST_CASE("chat transport failures are retried then reported") {
    HttpChatConfig cfg;
    cfg.url = "http://127.0.0.1:" + std::to_string(free_port());
    cfg.initial_backoff_ms = 1;
    cfg.max_retries = 3;
    cfg.timeout_seconds = 2;
    HttpChatProvider chat(cfg);
    const auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(chat.complete("anyone?"), Error);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(elapsed >= std::chrono::milliseconds(7));  // backoff 1 + 2 + 4 ms
    CHECK(elapsed < std::chrono::seconds(2));
    CHECK_THROWS_AS(HttpChatProvider(HttpChatConfig{}), Error);
}
