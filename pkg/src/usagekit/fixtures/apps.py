"""Five scripted shopping apps that share one canonical structure.

Each app renders the same eight screen categories with its own theme, layout
jitter, and wording, and defines the same five usages. One app can be built
with a deliberately unfindable password-recovery entry point (an unlabeled
button whose text matches no category terms), which is the knob evaluation
uses to exercise generation failure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from usagekit.classify.hashing import fnv1a_64
from usagekit.errors import FixtureError
from usagekit import font
from usagekit.fixtures.render import ScreenSpec, Theme, WidgetSpec
from usagekit.gui.types import Box
from usagekit.tomlio import read_toml, write_toml
from usagekit.video.types import ActionKind

APP_SCHEMA = "usagekit-app v1"
SCREEN_W = 360
SCREEN_H = 640
FPS = 10.0

APP_IDS = ("shopmart", "dealhub", "cartly", "buyrite", "shopwave")
USAGE_IDS = ("sign_in", "search", "add_cart", "open_help", "reset_password")

# script widget kind -> UI class exposed through the adapter
KIND_TO_CLASS = {
    "button": "Button",
    "field": "EditText",
    "label": "TextView",
    "icon": "ImageButton",
    "list_item": "ListItem",
    "checkbox": "Checkbox",
    "image": "Other",
}


@dataclass(frozen=True)
class UsageStep:
    screen: str                     # screen id the step happens on
    widget: Optional[str]           # widget id; None for swipes
    kind: ActionKind
    text: str = ""                  # typed into the widget after the tap
    swipe: Optional[Tuple[int, int, int, int]] = None  # x0, y0, x1, y1


@dataclass(frozen=True)
class UsageScript:
    usage_id: str
    steps: Tuple[UsageStep, ...]
    final_screen: str


@dataclass
class AppScript:
    """A simulated target app: render specs, transition table, usage scripts."""

    app_id: str
    width: int
    height: int
    theme: Theme
    screens: Dict[str, ScreenSpec]
    transitions: Dict[Tuple[str, str, str], str]   # (screen, widget|"", action) -> screen
    text_fields: Set[Tuple[str, str]]              # (screen, widget) accepting input
    initial: str
    usages: Tuple[UsageScript, ...] = ()

    def screen(self, sid: str) -> ScreenSpec:
        try:
            return self.screens[sid]
        except KeyError:
            raise FixtureError(f"app {self.app_id!r} has no screen {sid!r}") from None

    def usage(self, usage_id: str) -> UsageScript:
        for u in self.usages:
            if u.usage_id == usage_id:
                return u
        raise FixtureError(f"app {self.app_id!r} has no usage {usage_id!r}")

    def destination(self, sid: str, wid: str, action: ActionKind) -> str:
        return self.transitions.get((sid, wid, action.value), sid)


_PALETTES: Dict[str, Theme] = {
    "shopmart": Theme(
        bg=(246, 246, 246), panel=(226, 230, 232), fill=(189, 160, 80),
        accent=(72, 96, 232), field_bg=(232, 240, 248), border=(96, 96, 96),
        text=(32, 32, 32), text_on_fill=(250, 252, 254), hint=(150, 150, 150),
    ),
    "dealhub": Theme(
        bg=(250, 247, 240), panel=(234, 228, 214), fill=(96, 168, 48),
        accent=(48, 64, 200), field_bg=(240, 234, 222), border=(110, 100, 84),
        text=(40, 36, 28), text_on_fill=(248, 250, 246), hint=(158, 150, 134),
    ),
    "cartly": Theme(
        bg=(244, 240, 248), panel=(226, 220, 236), fill=(196, 112, 88),
        accent=(180, 60, 160), field_bg=(236, 230, 244), border=(104, 92, 116),
        text=(44, 32, 48), text_on_fill=(252, 248, 252), hint=(160, 146, 170),
    ),
    "buyrite": Theme(
        bg=(240, 248, 246), panel=(218, 234, 230), fill=(72, 144, 192),
        accent=(32, 120, 40), field_bg=(228, 242, 238), border=(88, 108, 102),
        text=(28, 44, 40), text_on_fill=(246, 252, 250), hint=(140, 160, 154),
    ),
    "shopwave": Theme(
        bg=(248, 244, 238), panel=(232, 224, 210), fill=(150, 96, 200),
        accent=(210, 130, 40), field_bg=(238, 232, 220), border=(106, 96, 80),
        text=(36, 30, 22), text_on_fill=(250, 248, 244), hint=(156, 148, 132),
    ),
}

# per-app wording; every variant keeps at least one token from the matching
# category's term list so term correlation can find it
_WORDS = {
    "shopmart": dict(
        account="ACCOUNT", help="HELP", cart="CART", signin="SIGN IN",
        username="USERNAME", forgot="FORGOT PASSWORD", reset="RESET",
        buy="ADD TO BAG", checkout="CHECKOUT", title_signin="SIGN IN",
        title_assist="RESET PASSWORD", title_results="RESULTS",
        title_cart="CART", title_account="MY ACCOUNT", title_help="HELP CENTER",
        user="MILO", password="WXK2", query="SOCKS", cart_query="BELT",
    ),
    "dealhub": dict(
        account="MY PROFILE", help="SUPPORT", cart="BASKET", signin="LOG IN",
        username="EMAIL", forgot="RESET PASSWORD", reset="SEND RESET",
        buy="ADD TO CART", checkout="PLACE ORDER", title_signin="LOG IN",
        title_assist="PASSWORD RESET", title_results="SEARCH RESULTS",
        title_cart="MY CART", title_account="ACCOUNT", title_help="HELP",
        user="NIKO", password="FROG7", query="TOTE", cart_query="HOOD",
    ),
    "cartly": dict(
        account="PROFILE", help="FAQ", cart="CART", signin="SIGN IN",
        username="USER NAME", forgot="RECOVER ACCOUNT", reset="RESET NOW",
        buy="BUY NOW", checkout="PAY NOW", title_signin="WELCOME BACK",
        title_assist="RESET ACCESS", title_results="RESULTS",
        title_cart="YOUR CART", title_account="ACCOUNT HOME", title_help="HELP DESK",
        user="RUBY", password="LEMON", query="BOOTS", cart_query="KILT",
    ),
    "buyrite": dict(
        account="MY ACCOUNT", help="GET HELP", cart="CART", signin="SIGN IN",
        username="NAME", forgot="FORGOT YOUR PASSWORD", reset="RESET",
        buy="ADD TO BASKET", checkout="ORDER NOW", title_signin="MEMBER SIGN IN",
        title_assist="RESET YOUR PASSWORD", title_results="SEARCH RESULTS",
        title_cart="CART ITEMS", title_account="ACCOUNT", title_help="SUPPORT HELP",
        user="TESS", password="RIVET", query="VEST", cart_query="MITTS",
    ),
    "shopwave": dict(
        account="ACCOUNT", help="HELP", cart="CART", signin="SIGN IN",
        username="USERNAME", forgot="FORGOT PASSWORD", reset="RESET",
        buy="PURCHASE", checkout="CHECKOUT NOW", title_signin="SIGN IN NOW",
        title_assist="RESET PASSWORD", title_results="RESULTS",
        title_cart="CART", title_account="MY ACCOUNT", title_help="HELP TOPICS",
        user="IVY", password="SUN34", query="DENIM", cart_query="CREW",
    ),
}

_PRODUCTS = (
    "RED SHOES", "BLUE JACKET", "WOOL HAT", "DENIM BELT",
    "SILK SCARF", "RAIN BOOTS", "TRAIL PACK", "CANVAS TOTE",
)
_HELP_TOPICS = (
    ("FAQ", "CONTACT US", "ABOUT"),
    ("FAQ", "CONTACT", "TERMS"),
    ("FAQ", "CONTACT US", "RETURNS"),
)

# keys in the leftmost/rightmost keyboard columns sit too close to the frame
# border for the touch detector, so scripted typing must not use them
EDGE_KEYS = frozenset("1 0 Q P A @ Z _".split())


def check_typable(text: str) -> str:
    from usagekit.fixtures.render import KEY_ROWS

    allowed = set("".join(KEY_ROWS)) - EDGE_KEYS
    for ch in text:
        if ch not in allowed:
            raise FixtureError(f"character {ch!r} of {text!r} cannot be typed in fixtures")
    return text


def _label_box(x: int, y: int, text: str, scale: int) -> Box:
    tw, th = font.text_size(text, scale)
    return Box(x, y, tw, th)


def build_app(app_id: str, seed: int = 7, unmatchable: bool = False) -> AppScript:
    """Construct one fixture app deterministically from (app_id, seed)."""
    if app_id not in _PALETTES:
        raise FixtureError(f"unknown fixture app {app_id!r}")
    theme = _PALETTES[app_id]
    words = _WORDS[app_id]
    rng = np.random.default_rng([seed, fnv1a_64(app_id.encode("utf-8")) % 2**32])
    app_index = list(_PALETTES).index(app_id)

    def j(amount: int = 8) -> int:
        return int(rng.integers(-amount, amount + 1))

    W, H = SCREEN_W, SCREEN_H
    s = theme.scale
    screens: Dict[str, ScreenSpec] = {}

    # ---- home ---------------------------------------------------------------
    search_box = Box(16 + j(4), 76 + j(6), 228 + j(6), 44)
    products = list(rng.choice(_PRODUCTS, size=4, replace=False))
    screens["home"] = ScreenSpec("home", "home", [
        WidgetSpec("title", "label", _label_box(18, 22 + j(4), app_id.upper(), s),
                   text=app_id.upper()),
        WidgetSpec("menu", "icon", Box(W - 58 + j(4), 14 + j(4), 44, 44),
                   icon="bars", canonical="menu"),
        WidgetSpec("search", "field", search_box, text="SEARCH", canonical="search"),
        WidgetSpec("go", "button", Box(search_box.x2 + 10, search_box.y, 62, 44),
                   text="GO", canonical="search"),
        WidgetSpec("hero", "image", Box(16 + j(4), 146 + j(6), W - 32 - j(4), 116 + j(6))),
        WidgetSpec("account", "button", Box(16 + j(4), 288 + j(6), 152 + j(6), 48),
                   text=words["account"], canonical="account"),
        WidgetSpec("help", "button", Box(W - 168 + j(4), 288 + j(6), 150, 48),
                   text=words["help"], canonical="help"),
        WidgetSpec("cart", "button", Box(16 + j(4), 360 + j(6), 132 + j(6), 44),
                   text=words["cart"], canonical="cart"),
    ])

    # ---- sign_in ------------------------------------------------------------
    signin_widgets = [
        WidgetSpec("logo", "icon", Box(W // 2 - 24 + j(4), 22 + j(4), 48, 48),
                   icon="diamond"),
        WidgetSpec("title", "label",
                   _label_box(20 + j(4), 96 + j(4), words["title_signin"], s),
                   text=words["title_signin"]),
        WidgetSpec("username", "field", Box(20 + j(4), 140 + j(4), W - 44, 44),
                   text=words["username"], canonical="username"),
        WidgetSpec("password", "field", Box(20 + j(4), 200 + j(4), W - 44, 44),
                   text="PASSWORD", canonical="password"),
        WidgetSpec("signin", "button", Box(20 + j(4), 262 + j(4), W - 44, 48),
                   text=words["signin"], style="accent", canonical="sign_in"),
    ]
    if unmatchable:
        signin_widgets.append(
            WidgetSpec("forgot", "button", Box(W - 70, 16, 54, 34), text="XQZJ",
                       canonical="forgot_password", text_scale=1)
        )
        signin_widgets.append(
            WidgetSpec("promo", "label", _label_box(20 + j(4), 334 + j(4), "NEW HERE", s),
                       text="NEW HERE"),
        )
    else:
        signin_widgets.append(
            WidgetSpec("forgot", "label",
                       _label_box(20 + j(4), 334 + j(4), words["forgot"], s),
                       text=words["forgot"], canonical="forgot_password")
        )
    screens["sign_in"] = ScreenSpec("sign_in", "sign_in", signin_widgets)

    # ---- password_assistant ---------------------------------------------------
    screens["password_assistant"] = ScreenSpec("password_assistant", "password_assistant", [
        WidgetSpec("title", "label",
                   _label_box(20 + j(4), 30 + j(4), words["title_assist"], s),
                   text=words["title_assist"]),
        WidgetSpec("note", "label",
                   _label_box(20 + j(4), 78 + j(4), "RESET LINK BY EMAIL", 1),
                   text="RESET LINK BY EMAIL", text_scale=1),
        WidgetSpec("email", "field", Box(20 + j(4), 120 + j(4), W - 44, 44),
                   text=words["username"], canonical="username"),
        WidgetSpec("send", "button", Box(20 + j(4), 184 + j(4), 180 + j(6), 48),
                   text=words["reset"], style="accent", canonical="forgot_password"),
    ])

    # ---- search_results -------------------------------------------------------
    items = []
    item_y = 96 + j(4)
    for idx, name in enumerate(products):
        items.append(
            WidgetSpec(f"item{idx}", "list_item", Box(16, item_y, W - 32, 52),
                       text=str(name), canonical="item",
                       parent="results", parent_class="ListView")
        )
        item_y += 52 + 6
    screens["search_results"] = ScreenSpec("search_results", "search_results", [
        WidgetSpec("title", "label",
                   _label_box(18 + j(4), 24 + j(4), words["title_results"], s),
                   text=words["title_results"]),
        WidgetSpec("filter", "icon", Box(W - 58 + j(4), 16 + j(4), 42, 42), icon="funnel"),
        *items,
    ])

    # ---- product_detail ---------------------------------------------------------
    product = str(products[1])
    price = f"PRICE {int(rng.integers(15, 95))}"
    screens["product_detail"] = ScreenSpec("product_detail", "product_detail", [
        WidgetSpec("title", "label", _label_box(18 + j(4), 24 + j(4), product, s),
                   text=product),
        WidgetSpec("cart", "icon", Box(W - 58 + j(4), 14 + j(4), 44, 44),
                   icon="squares", canonical="cart"),
        WidgetSpec("photo", "image", Box(16 + j(4), 78 + j(4), W - 32, 148 + j(6))),
        WidgetSpec("price", "label", _label_box(18 + j(4), 248 + j(4), price, s),
                   text=price),
        WidgetSpec("buy", "button", Box(16 + j(4), 292 + j(6), W - 32 - j(6), 48),
                   text=words["buy"], style="accent", canonical="buy"),
    ])

    # ---- shopping_cart ---------------------------------------------------------
    cart_items = []
    cy = 90 + j(4)
    for idx in range(2):
        cart_items.append(
            WidgetSpec(f"line{idx}", "list_item", Box(16, cy, W - 32, 52),
                       text=str(products[idx]), canonical="item",
                       parent="cartlist", parent_class="ListView")
        )
        cy += 52 + 6
    screens["shopping_cart"] = ScreenSpec("shopping_cart", "shopping_cart", [
        WidgetSpec("title", "label",
                   _label_box(18 + j(4), 24 + j(4), words["title_cart"], s),
                   text=words["title_cart"]),
        *cart_items,
        WidgetSpec("total", "label",
                   _label_box(18 + j(4), cy + 14, f"TOTAL {int(rng.integers(30, 180))}", s),
                   text=f"TOTAL {int(rng.integers(30, 180))}"),
        WidgetSpec("checkout", "button", Box(16 + j(4), cy + 58 + j(4), W - 32, 48),
                   text=words["checkout"], style="accent", canonical="checkout"),
    ])

    # ---- account ----------------------------------------------------------------
    screens["account"] = ScreenSpec("account", "account", [
        WidgetSpec("title", "label",
                   _label_box(18 + j(4), 26 + j(4), words["title_account"], s),
                   text=words["title_account"]),
        WidgetSpec("who", "label",
                   _label_box(18 + j(4), 80 + j(4), f"SIGNED IN AS {words['user']}", 1),
                   text=f"SIGNED IN AS {words['user']}", text_scale=1),
        WidgetSpec("offers", "checkbox", Box(20 + j(4), 140 + j(4), 26, 26),
                   style="checked" if app_index % 2 == 0 else ""),
        WidgetSpec("offerslabel", "label",
                   _label_box(58 + j(4), 146 + j(4), "EMAIL OFFERS", 1),
                   text="EMAIL OFFERS", text_scale=1),
        WidgetSpec("help", "button", Box(20 + j(4), 206 + j(6), 170 + j(6), 46),
                   text=words["help"], canonical="help"),
    ])

    # ---- help ---------------------------------------------------------------------
    topics = _HELP_TOPICS[app_index % len(_HELP_TOPICS)]
    topic_widgets = []
    ty = 90 + j(4)
    for idx, topic in enumerate(topics):
        topic_widgets.append(
            WidgetSpec(f"topic{idx}", "list_item", Box(16, ty, W - 32, 50),
                       text=topic, canonical="item",
                       parent="topics", parent_class="ListView")
        )
        ty += 50 + 6
    screens["help"] = ScreenSpec("help", "help", [
        WidgetSpec("title", "label",
                   _label_box(18 + j(4), 24 + j(4), words["title_help"], s),
                   text=words["title_help"]),
        *topic_widgets,
        WidgetSpec("hours", "label", _label_box(18 + j(4), ty + 12, "SUPPORT 24/7", 1),
                   text="SUPPORT 24/7", text_scale=1),
    ])

    transitions: Dict[Tuple[str, str, str], str] = {
        ("home", "menu", "click"): "sign_in",
        ("home", "account", "click"): "account",
        ("home", "help", "click"): "help",
        ("home", "cart", "click"): "shopping_cart",
        ("home", "search", "click"): "home",
        ("home", "go", "click"): "search_results",
        ("sign_in", "username", "click"): "sign_in",
        ("sign_in", "password", "click"): "sign_in",
        ("sign_in", "signin", "click"): "account",
        ("sign_in", "forgot", "click"): "password_assistant",
        ("password_assistant", "email", "click"): "password_assistant",
        ("password_assistant", "send", "click"): "password_assistant",
        ("search_results", "", "swipe_up"): "search_results",
        ("search_results", "item1", "click"): "product_detail",
        ("product_detail", "buy", "click"): "shopping_cart",
        ("product_detail", "cart", "click"): "shopping_cart",
        ("account", "help", "click"): "help",
        ("help", "", "swipe_up"): "help",
        ("help", "topic0", "click"): "help",
    }
    text_fields = {
        ("home", "search"),
        ("sign_in", "username"),
        ("sign_in", "password"),
        ("password_assistant", "email"),
    }

    usages = _build_usages(app_id, app_index, words)
    app = AppScript(
        app_id=app_id, width=W, height=H, theme=theme, screens=screens,
        transitions=transitions, text_fields=text_fields, initial="home",
        usages=usages,
    )
    _validate_app(app)
    return app


def _build_usages(app_id: str, app_index: int, words: Dict[str, str]) -> Tuple[UsageScript, ...]:
    click = ActionKind.CLICK
    swipe = ActionKind.SWIPE_UP
    mid = SCREEN_W // 2

    sign_in = UsageScript("sign_in", (
        UsageStep("home", "menu", click),
        UsageStep("sign_in", "username", click, text=check_typable(words["user"])),
        UsageStep("sign_in", "password", click, text=check_typable(words["password"])),
        UsageStep("sign_in", "signin", click),
    ), final_screen="account")

    search = UsageScript("search", (
        UsageStep("home", "search", click, text=check_typable(words["query"])),
        UsageStep("home", "go", click),
    ), final_screen="search_results")

    add_cart = UsageScript("add_cart", (
        UsageStep("home", "search", click, text=check_typable(words["cart_query"])),
        UsageStep("home", "go", click),
        UsageStep("search_results", None, swipe, swipe=(mid, 400, mid, 290)),
        UsageStep("search_results", "item1", click),
        UsageStep("product_detail", "buy", click),
    ), final_screen="shopping_cart")

    if app_index % 2 == 0:
        open_help = UsageScript("open_help", (
            UsageStep("home", "account", click),
            UsageStep("account", "help", click),
            UsageStep("help", None, swipe, swipe=(mid, 420, mid, 300)),
            UsageStep("help", "topic0", click),
        ), final_screen="help")
    else:
        open_help = UsageScript("open_help", (
            UsageStep("home", "help", click),
            UsageStep("help", None, swipe, swipe=(mid, 420, mid, 300)),
            UsageStep("help", "topic0", click),
            UsageStep("help", "topic0", click),
        ), final_screen="help")

    reset_password = UsageScript("reset_password", (
        UsageStep("home", "menu", click),
        UsageStep("sign_in", "forgot", click),
        UsageStep("password_assistant", "email", click, text=check_typable(words["user"])),
        UsageStep("password_assistant", "send", click),
    ), final_screen="password_assistant")

    return (sign_in, search, add_cart, open_help, reset_password)


def _validate_app(app: AppScript) -> None:
    if app.initial not in app.screens:
        raise FixtureError(f"initial screen {app.initial!r} undefined")
    for (sid, wid, action), to in app.transitions.items():
        if sid not in app.screens or to not in app.screens:
            raise FixtureError(f"transition references unknown screen: {sid}->{to}")
        if wid and all(w.wid != wid for w in app.screens[sid].widgets):
            raise FixtureError(f"transition references unknown widget {sid}.{wid}")
        if not wid and not ActionKind(action).is_swipe:
            raise FixtureError(f"widgetless transition must be a swipe: {sid} {action}")
    for sid, wid in app.text_fields:
        if app.screens[sid].widget(wid).kind != "field":
            raise FixtureError(f"text field {sid}.{wid} is not a field widget")
    for usage in app.usages:
        for step in usage.steps:
            spec = app.screen(step.screen)
            if step.widget is None:
                if not step.kind.is_swipe or step.swipe is None:
                    raise FixtureError(f"swipe step missing path in {usage.usage_id}")
            else:
                spec.widget(step.widget)
                if step.text and (step.screen, step.widget) not in app.text_fields:
                    raise FixtureError(
                        f"step types into non-field {step.screen}.{step.widget}"
                    )
        app.screen(usage.final_screen)


def widget_class(spec: WidgetSpec) -> str:
    return KIND_TO_CLASS[spec.kind]


def render_app_screen(
    app: AppScript,
    sid: str,
    typed: Optional[Dict[str, str]] = None,
    keyboard: bool = False,
) -> np.ndarray:
    from usagekit.fixtures.render import render_screen

    return render_screen(
        app.screen(sid), app.theme, app.width, app.height, typed=typed, keyboard=keyboard
    )


def spec_to_widget(spec: WidgetSpec, screen_img: np.ndarray):
    """Widget view of a scripted element, as the device adapter exposes it."""
    from usagekit.gui.types import Widget, zone_of

    h, w = screen_img.shape[:2]
    b = spec.box
    crop = screen_img[max(b.y, 0):min(b.y2, h), max(b.x, 0):min(b.x2, w)].copy()
    return Widget(
        box=b,
        crop=crop,
        class_type=widget_class(spec),
        zone=zone_of(b, w, h),
        text=spec.text,
        parent_class=spec.parent_class,
    )


def build_all_apps(seed: int = 7, unmatchable_app: str = "") -> Dict[str, AppScript]:
    return {
        app_id: build_app(app_id, seed=seed, unmatchable=(app_id == unmatchable_app))
        for app_id in APP_IDS
    }


# ---------------------------------------------------------------------------
# serialization

def app_to_dict(app: AppScript) -> dict:
    theme = app.theme
    return {
        "schema": APP_SCHEMA,
        "app": {
            "id": app.app_id, "width": app.width, "height": app.height,
            "initial": app.initial,
        },
        "theme": {
            "bg": list(theme.bg), "panel": list(theme.panel), "fill": list(theme.fill),
            "accent": list(theme.accent), "field_bg": list(theme.field_bg),
            "border": list(theme.border), "text": list(theme.text),
            "text_on_fill": list(theme.text_on_fill), "hint": list(theme.hint),
            "scale": theme.scale,
        },
        "screens": [
            {
                "sid": spec.sid,
                "canonical": spec.canonical,
                "widgets": [
                    {
                        "wid": w.wid, "kind": w.kind,
                        "box": [w.box.x, w.box.y, w.box.w, w.box.h],
                        "text": w.text, "icon": w.icon, "style": w.style,
                        "canonical": w.canonical, "parent": w.parent,
                        "parent_class": w.parent_class,
                        "tap": [w.tap[0], w.tap[1]], "text_scale": w.text_scale,
                    }
                    for w in spec.widgets
                ],
            }
            for spec in app.screens.values()
        ],
        "transitions": [
            {"screen": sid, "widget": wid, "action": action, "to": to}
            for (sid, wid, action), to in sorted(app.transitions.items())
        ],
        "text_fields": sorted([sid, wid] for sid, wid in app.text_fields),
        "usages": [
            {
                "usage_id": u.usage_id,
                "final_screen": u.final_screen,
                "steps": [
                    {
                        "screen": st.screen,
                        "widget": st.widget if st.widget is not None else "",
                        "action": st.kind.value,
                        "text": st.text,
                        "swipe": list(st.swipe) if st.swipe else [],
                    }
                    for st in u.steps
                ],
            }
            for u in app.usages
        ],
    }


def app_from_dict(data: dict) -> AppScript:
    if data.get("schema") != APP_SCHEMA:
        raise FixtureError(f"unsupported app file schema {data.get('schema')!r}")
    t = data["theme"]
    theme = Theme(
        bg=tuple(t["bg"]), panel=tuple(t["panel"]), fill=tuple(t["fill"]),
        accent=tuple(t["accent"]), field_bg=tuple(t["field_bg"]),
        border=tuple(t["border"]), text=tuple(t["text"]),
        text_on_fill=tuple(t["text_on_fill"]), hint=tuple(t["hint"]),
        scale=int(t["scale"]),
    )
    screens: Dict[str, ScreenSpec] = {}
    for sd in data["screens"]:
        widgets = [
            WidgetSpec(
                wid=wd["wid"], kind=wd["kind"], box=Box(*wd["box"]),
                text=wd["text"], icon=wd["icon"], style=wd["style"],
                canonical=wd["canonical"], parent=wd["parent"],
                parent_class=wd["parent_class"],
                tap=(float(wd["tap"][0]), float(wd["tap"][1])),
                text_scale=int(wd["text_scale"]),
            )
            for wd in sd["widgets"]
        ]
        screens[sd["sid"]] = ScreenSpec(sd["sid"], sd["canonical"], widgets)
    transitions = {
        (tr["screen"], tr["widget"], tr["action"]): tr["to"]
        for tr in data["transitions"]
    }
    usages = tuple(
        UsageScript(
            usage_id=ud["usage_id"],
            final_screen=ud["final_screen"],
            steps=tuple(
                UsageStep(
                    screen=sd["screen"],
                    widget=sd["widget"] or None,
                    kind=ActionKind(sd["action"]),
                    text=sd["text"],
                    swipe=tuple(sd["swipe"]) if sd["swipe"] else None,
                )
                for sd in ud["steps"]
            ),
        )
        for ud in data["usages"]
    )
    app = AppScript(
        app_id=data["app"]["id"], width=int(data["app"]["width"]),
        height=int(data["app"]["height"]), theme=theme, screens=screens,
        transitions=transitions,
        text_fields={(sid, wid) for sid, wid in data["text_fields"]},
        initial=data["app"]["initial"], usages=usages,
    )
    _validate_app(app)
    return app


def save_app(app: AppScript, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_toml(path, app_to_dict(app))
    return path


def load_app(path: Path | str) -> AppScript:
    try:
        return app_from_dict(read_toml(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureError(f"malformed app file {path}: {exc}") from exc
