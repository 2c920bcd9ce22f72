"""HTTP ask/tell service over the campaign store.

Endpoints (JSON bodies and responses; full schemas in docs/api.md):

    POST  /campaigns                 create a campaign, returns id + initial design
    GET   /campaigns                 list campaign ids
    GET   /campaigns/{id}            full persisted campaign document
    GET   /campaigns/{id}/export.csv observation history as CSV
    POST  /campaigns/{id}/tell       record an observation (persisted before the response)
    POST  /campaigns/{id}/suggest    next point; idempotent until the next tell
    PATCH /campaigns/{id}/config     switch acquisition settings

Observations are acknowledged only after the campaign file has been
atomically replaced, so a crash between persist and response never loses a
told result. Per-campaign mutations hold an exclusive lock.
"""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import PlainTextResponse, RedirectResponse, Response

from .acquisition import ACQ_KINDS, AcqSpec
from .engine import Campaign, CampaignError, KernelConfig, SuggestConfig
from .space import MixedPoint, SearchSpace, SpaceError, validate_point
from .store import CampaignStore, UnknownCampaignError
from .studies import campaign_history_csv

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class ServiceSettings:
    host: str = "127.0.0.1"
    port: int = 8321
    store_root: str = "./campaigns"
    static_dir: str | None = None
    engine: dict[str, Any] = field(default_factory=dict)  # default config for new campaigns


_ENV_KEYS = {
    "CATBOX_HOST": "host",
    "CATBOX_PORT": "port",
    "CATBOX_STORE_ROOT": "store_root",
    "CATBOX_STATIC_DIR": "static_dir",
}


def load_settings(
    config_path: str | None = None,
    env: dict[str, str] | None = None,
    overrides: dict[str, Any] | None = None,
) -> ServiceSettings:
    """Settings precedence: explicit overrides (flags) beat env beat config file beat defaults."""
    env = dict(os.environ if env is None else env)
    settings = ServiceSettings()
    path = config_path or env.get("CATBOX_CONFIG")
    if path:
        with open(path, "rb") as f:
            doc = tomllib.load(f)
        svc = doc.get("service", {})
        for key in ("host", "port", "store_root", "static_dir"):
            if key in svc:
                setattr(settings, key, svc[key])
        settings.engine = dict(doc.get("engine", {}))
    for env_key, attr in _ENV_KEYS.items():
        if env_key in env:
            value: Any = env[env_key]
            if attr == "port":
                value = int(value)
            setattr(settings, attr, value)
    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(settings, key, value)
    settings.port = int(settings.port)
    return settings


def _parse_point(doc: Any) -> MixedPoint:
    try:
        return MixedPoint.from_json(doc)
    except SpaceError as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc


def _campaign_summary(campaign: Campaign) -> dict[str, Any]:
    return {
        "id": campaign.campaign_id,
        "n_observations": len(campaign.history),
        "incumbent": None
        if campaign.incumbent is None
        else {"point": campaign.incumbent[0].to_json(), "y": campaign.incumbent[1]},
        "trust_region": campaign.tr.to_json(),
        "direction": campaign.direction,
        "acq": {"kind": campaign.acq.kind, "xi": campaign.acq.xi, "beta": campaign.acq.beta},
    }


def build_campaign(space_doc: dict[str, Any], config_doc: dict[str, Any], defaults: dict[str, Any]) -> Campaign:
    """Construct a campaign from wire documents; raises SpaceError/CampaignError on bad input."""
    space = SearchSpace.from_json(space_doc)
    merged = dict(defaults)
    merged.update(config_doc or {})
    suggest_doc = dict(SuggestConfig().to_json())
    for key in suggest_doc:
        if key in merged:
            suggest_doc[key] = merged[key]
    suggest_doc.update(merged.get("suggest", {}))
    acq_doc = merged.get("acq", {})
    kernel_doc = dict(KernelConfig().to_json())
    kernel_doc.update(merged.get("kernel", {}))
    return Campaign.new(
        space,
        config=SuggestConfig.from_json(suggest_doc),
        acq=AcqSpec(
            kind=acq_doc.get("kind", "ei"),
            xi=float(acq_doc.get("xi", 0.01)),
            beta=float(acq_doc.get("beta", 2.0)),
        ),
        kernel=KernelConfig.from_json(kernel_doc),
        direction=merged.get("direction", "maximize"),
    )


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()
    store = CampaignStore(settings.store_root)
    app = FastAPI(title="catbox campaign service")
    app.state.store = store
    app.state.settings = settings

    def get_campaign(campaign_id: str) -> Campaign:
        try:
            return store.load(campaign_id)
        except UnknownCampaignError:
            raise HTTPException(status_code=404, detail=f"unknown campaign {campaign_id!r}")

    @app.post("/campaigns", status_code=201)
    def create_campaign(body: dict[str, Any] = Body(...)):
        if "space" not in body:
            raise HTTPException(status_code=400, detail="body must contain 'space'")
        try:
            campaign = build_campaign(body["space"], body.get("config", {}), settings.engine)
        except (SpaceError, CampaignError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        campaign_id = store.create(campaign)
        return {"id": campaign_id, "initial_design": [p.to_json() for p in campaign.initial_points]}

    @app.get("/campaigns")
    def list_campaigns():
        return store.list_ids()

    @app.get("/campaigns/{campaign_id}")
    def get_campaign_doc(campaign_id: str):
        try:
            return store.load_doc(campaign_id)
        except UnknownCampaignError:
            raise HTTPException(status_code=404, detail=f"unknown campaign {campaign_id!r}")

    @app.get("/campaigns/{campaign_id}/export.csv")
    def export_csv(campaign_id: str):
        campaign = get_campaign(campaign_id)
        return Response(content=campaign_history_csv(campaign), media_type="text/csv")

    @app.post("/campaigns/{campaign_id}/tell")
    def tell(campaign_id: str, body: dict[str, Any] = Body(...)):
        with store.lock(campaign_id):
            campaign = get_campaign(campaign_id)  # 404 takes precedence
            if "point" not in body or "y" not in body:
                raise HTTPException(status_code=409, detail="body must contain 'point' and 'y'")
            point = _parse_point(body["point"])
            try:
                y = float(body["y"])
            except (TypeError, ValueError) as exc:
                raise HTTPException(status_code=409, detail="y must be a number") from exc
            if not math.isfinite(y):
                raise HTTPException(status_code=409, detail="y must be finite")
            err = validate_point(campaign.space, point)
            if err is not None:
                raise HTTPException(status_code=409, detail=f"invalid point: {err}")
            campaign.tell(point, y)
            store.save(campaign)  # persist before acknowledging
        return _campaign_summary(campaign)

    @app.post("/campaigns/{campaign_id}/suggest")
    def suggest(campaign_id: str):
        with store.lock(campaign_id):
            campaign = get_campaign(campaign_id)
            if not campaign.history:
                raise HTTPException(
                    status_code=422,
                    detail="no observations yet: run the initial design and tell the results first",
                )
            if campaign.pending is not None:
                return {"point": campaign.pending[0].to_json(), "pending": True}
            point = campaign.suggest()
            store.save(campaign)
        return {"point": point.to_json(), "pending": False}

    @app.patch("/campaigns/{campaign_id}/config")
    def patch_config(campaign_id: str, body: dict[str, Any] = Body(...)):
        kind = body.get("acq")
        if kind is not None and kind not in ACQ_KINDS:
            raise HTTPException(status_code=400, detail=f"acq must be one of {ACQ_KINDS}")
        with store.lock(campaign_id):
            campaign = get_campaign(campaign_id)
            acq = campaign.acq
            acq = replace(
                acq,
                kind=kind or acq.kind,
                xi=float(body.get("xi", acq.xi)),
                beta=float(body.get("beta", acq.beta)),
            )
            campaign.acq = acq
            campaign.pending = None  # the switch takes effect on the next suggest
            store.save(campaign)
        return _campaign_summary(campaign)

    static_dir = settings.static_dir
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

        @app.get("/", include_in_schema=False)
        def index():
            return RedirectResponse(url="/ui/")

    else:

        @app.get("/", include_in_schema=False)
        def index_plain():
            return PlainTextResponse("catbox campaign service; API under /campaigns\n")

    return app


def serve(settings: ServiceSettings) -> None:
    import uvicorn

    uvicorn.run(create_app(settings), host=settings.host, port=settings.port)
