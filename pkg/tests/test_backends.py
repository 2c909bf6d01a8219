import json

import httpx
import pytest

from trajforge.backends import (Cassette, CassetteEntry, CassetteTransport, CompletionRequest,
                                FakeClock, MyGeneClient, OncoTreeClient, OpenAICompatibleBackend,
                                RecordingBackend, ReplayBackend, ScriptedBackend, complete,
                                fingerprint, make_backend, make_judge, mock_tool)
from trajforge.exceptions import (BackendError, CassetteMismatch, ConfigError, QuotaError,
                                  ScriptExhausted, TransportError)


def chat_reply(text):
    return {"choices": [{"message": {"role": "assistant", "content": text}}]}


def openai_backend(handler, attempts=3):
    return OpenAICompatibleBackend("http://llm.test/v1", "test-model", api_key="k",
                                   attempts=attempts, backoff=0.,
                                   transport=httpx.MockTransport(handler))


def test_fingerprint_ignores_images_but_not_generation_cap():
    a = CompletionRequest.for_prompt("hello", ["a.png"])
    b = CompletionRequest.for_prompt("hello")
    c = CompletionRequest.for_prompt("hello", max_tokens=16)
    assert fingerprint(a) == fingerprint(b)
    assert fingerprint(a) != fingerprint(c)


def test_complete_enforces_generation_cap():
    with pytest.raises(ValueError):
        complete(CompletionRequest.for_prompt("x", max_tokens=4096), ScriptedBackend(["y"]))
    with pytest.raises(ValueError):
        CompletionRequest.for_prompt("x", max_tokens=0)


def test_scripted_backend_replies_in_order_then_runs_out():
    backend = ScriptedBackend(["one", "two"])
    assert complete(CompletionRequest.for_prompt("a"), backend) == "one"
    assert complete(CompletionRequest.for_prompt("b"), backend) == "two"
    assert backend.remaining == 0
    with pytest.raises(ScriptExhausted):
        backend.complete(CompletionRequest.for_prompt("c"))
    assert [r.prompt for r in backend.requests] == ["a", "b"]


def test_scripted_backend_file_must_hold_strings(tmpdir):
    path = tmpdir.join("script.json")
    path.write(json.dumps(["a", 1]))
    with pytest.raises(ConfigError):
        ScriptedBackend.from_file(str(path))
    with pytest.raises(ConfigError):
        ScriptedBackend.from_file("")


def test_recorded_cassette_replays_the_same_completions(tmpdir):
    filename = str(tmpdir.join("cassette.jsonl"))
    recorder = RecordingBackend(ScriptedBackend(["first", "second"]), filename)
    requests = [CompletionRequest.for_prompt("p1"), CompletionRequest.for_prompt("p2")]
    assert [recorder.complete(r) for r in requests] == ["first", "second"]

    replay = ReplayBackend(Cassette.load(filename))
    assert [replay.complete(r) for r in requests] == ["first", "second"]


def test_replay_refuses_a_different_request():
    cassette = Cassette([CassetteEntry(fingerprint(CompletionRequest.for_prompt("p1")), "r")])
    with pytest.raises(CassetteMismatch):
        ReplayBackend(cassette).complete(CompletionRequest.for_prompt("other"))
    replay = ReplayBackend(cassette)
    replay.complete(CompletionRequest.for_prompt("p1"))
    with pytest.raises(ScriptExhausted):
        replay.complete(CompletionRequest.for_prompt("p1"))


def test_openai_backend_posts_chat_completion_with_inline_image(data_dir):
    seen = []

    def handler(request):
        seen.append(request)
        return httpx.Response(200, json=chat_reply("Final Answer: ok"))

    backend = openai_backend(handler)
    image = str(data_dir.joinpath("images", "NCBI375_16.8x22.11.png"))
    text = backend.complete(CompletionRequest.for_prompt("describe", [image], max_tokens=64))
    assert text == "Final Answer: ok"
    request, = seen
    assert str(request.url) == "http://llm.test/v1/chat/completions"
    assert request.headers["authorization"] == "Bearer k"
    payload = json.loads(request.content)
    assert payload["model"] == "test-model"
    assert payload["max_tokens"] == 64
    content = payload["messages"][0]["content"]
    assert content[0] == {"type": "text", "text": "describe"}
    assert content[1]["image_url"]["url"].startswith("data:image/png;base64,")


def test_openai_backend_retries_server_errors_and_quota():
    replies = iter([httpx.Response(503), httpx.Response(429, text="slow down"),
                    httpx.Response(200, json=chat_reply("done"))])
    backend = openai_backend(lambda request: next(replies))
    assert backend.complete(CompletionRequest.for_prompt("x")) == "done"


def test_openai_backend_gives_up_after_the_last_attempt():
    backend = openai_backend(lambda request: httpx.Response(429, text="quota"), attempts=2)
    with pytest.raises(QuotaError):
        backend.complete(CompletionRequest.for_prompt("x"))
    backend = openai_backend(lambda request: httpx.Response(500), attempts=2)
    with pytest.raises(TransportError):
        backend.complete(CompletionRequest.for_prompt("x"))


def test_openai_backend_does_not_retry_client_errors():
    calls = []

    def handler(request):
        calls.append(request)
        return httpx.Response(400, text="bad request")

    with pytest.raises(BackendError, match="rejected"):
        openai_backend(handler).complete(CompletionRequest.for_prompt("x"))
    assert len(calls) == 1


def test_openai_backend_rejects_malformed_body():
    backend = openai_backend(lambda request: httpx.Response(200, json={"choices": []}),
                             attempts=1)
    with pytest.raises(TransportError, match="malformed"):
        backend.complete(CompletionRequest.for_prompt("x"))


def test_openai_backend_needs_a_model():
    with pytest.raises(ConfigError):
        OpenAICompatibleBackend("http://llm.test/v1", "")


def test_oncotree_replays_recorded_lookups(data_dir):
    transport = CassetteTransport(data_dir.joinpath("cassettes", "oncotree.jsonl"))
    client = OncoTreeClient(transport=transport, attempts=1)
    observation = client.lookup("glioblastoma", "tumor")
    assert observation.splitlines()[0] == "Tumor/Disease: Glioblastoma (GB)"
    assert "**Tissue/Organ**: CNS/Brain" in observation
    assert "'parent': 'DIFG'" in observation
    assert client.lookup("prostate cancer", "tissue") == \
        "No results found for query 'prostate cancer'"
    with pytest.raises(CassetteMismatch):
        client.lookup("melanoma", "tumor")


def test_oncotree_rejects_unknown_query_type():
    with pytest.raises(ValueError):
        OncoTreeClient(transport=httpx.MockTransport(lambda r: httpx.Response(200))).lookup(
            "x", "organ")


def test_mygene_replays_recorded_queries(data_dir):
    transport = CassetteTransport(data_dir.joinpath("cassettes", "mygene.jsonl"))
    client = MyGeneClient(transport=transport, attempts=1)
    observation = client.query("ERBB2", 3)
    assert observation.startswith("1. Gene entry: erb-b2 receptor tyrosine kinase 2 "
                                  "(Entrez ID: 2064, Correlation Score: 141.54207)")
    assert "Summary: This gene encodes" in observation
    assert client.query("spatial transcriptomic signature", 3) == "No results found."


def test_mygene_retries_transport_failures():
    replies = iter([httpx.Response(502),
                    httpx.Response(200, json={"hits": [{"_id": "672", "_score": 12.5,
                                                        "name": "BRCA1 DNA repair associated"}]})])
    client = MyGeneClient(transport=httpx.MockTransport(lambda r: next(replies)), backoff=0.)
    observation = client.query("BRCA1", 1)
    assert observation == ("1. Gene entry: BRCA1 DNA repair associated (Entrez ID: 672, "
                           "Correlation Score: 12.5)\nSummary: No summary available.")


def test_mock_tool_behaviours_and_fake_delay():
    clock = FakeClock()
    assert mock_tool({"behavior": "echo"}, clock)({"text": "hi"}) == "hi"
    lookup = mock_tool({"behavior": "map", "responses": {"TP53": "tumor protein p53"}}, clock)
    assert lookup({"gene": "TP53"}) == "tumor protein p53"
    assert lookup({"gene": "KRAS"}) == "No results found."
    slow = mock_tool({"behavior": "fixed", "observation": "late", "delay": 400.}, clock)
    assert slow({}) == "late"
    assert clock.now() == 400.
    with pytest.raises(RuntimeError, match="down"):
        mock_tool({"behavior": "error", "message": "down"}, clock)({})
    with pytest.raises(ValueError):
        mock_tool({"behavior": "teleport"})


def test_backend_factory_builds_configured_backends(test_settings, tmpdir):
    script = tmpdir.join("replies.json")
    script.write(json.dumps(["Final Answer: hi"]))
    test_settings.update({"script_path": str(script), "judge": "scripted",
                          "judge_script_path": str(script)})
    assert isinstance(make_backend(test_settings), ScriptedBackend)
    assert isinstance(make_judge(test_settings), ScriptedBackend)
    test_settings["judge"] = ""
    assert make_judge(test_settings) is None
    test_settings.update({"backend": "replay", "cassette_path": ""})
    with pytest.raises(ConfigError):
        make_backend(test_settings)
