"""Model-guided test generation: adapters, matching, sessions, oracle runs."""
from usagekit.generate.adapter import (
    AdapterWidget,
    DeviceAdapter,
    DeviceState,
    ExternalProcessAdapter,
    ScriptedAdapter,
    ScriptEvent,
    UiNode,
    scripted_adapter,
)
from usagekit.generate.match import (
    PARENT_MATCH_RULES,
    REC_THRESHOLD,
    Recommendation,
    match_widgets,
    term_overlap,
)
from usagekit.generate.oracle import (
    LOG_COLUMNS,
    STEP_CAP,
    OracleResult,
    OracleStep,
    oracle_inputs_from_truth,
    oracle_inputs_from_usage,
    run_oracle_session,
    write_step_log,
)
from usagekit.generate.session import (
    SCRIPT_HEADER,
    GenerationSession,
    ScreenSuggestion,
    SessionClassifiers,
    SessionStatus,
    TestScript,
    choose_screen,
    choose_widget,
    classify_device_screen,
    fail_session,
    load_script,
    provide_text,
    replay,
    save_script,
    session_script,
    start_session,
)

__all__ = [
    "AdapterWidget",
    "DeviceAdapter",
    "DeviceState",
    "ExternalProcessAdapter",
    "ScriptedAdapter",
    "ScriptEvent",
    "UiNode",
    "scripted_adapter",
    "PARENT_MATCH_RULES",
    "REC_THRESHOLD",
    "Recommendation",
    "match_widgets",
    "term_overlap",
    "LOG_COLUMNS",
    "STEP_CAP",
    "OracleResult",
    "OracleStep",
    "oracle_inputs_from_truth",
    "oracle_inputs_from_usage",
    "run_oracle_session",
    "write_step_log",
    "SCRIPT_HEADER",
    "GenerationSession",
    "ScreenSuggestion",
    "SessionClassifiers",
    "SessionStatus",
    "TestScript",
    "choose_screen",
    "choose_widget",
    "classify_device_screen",
    "fail_session",
    "load_script",
    "provide_text",
    "replay",
    "save_script",
    "session_script",
    "start_session",
]
