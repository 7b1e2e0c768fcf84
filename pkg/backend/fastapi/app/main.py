from typing import List, Optional

import numpy as np
from fastapi import Depends, FastAPI, Header, HTTPException, Query, Request
from fastapi.responses import JSONResponse

from .config import api_key, get_config
from .errors import FrftError
from .services.crypto.drpe import generate_key
from .services.experiments import run_attack_demo
from .services.frft.core import Angle
from .services.frft.shifts import (FrequencyShift, SpatialShift, predicted_shifts, verify_amplitude_variance,
                                   verify_phase_invariance)
from .services.imageio.synthetic import synthetic_image
from .services.verification.suite import run_suite
from .types import (AttackIn, AttackMetrics, PredictedShifts, ShiftTheoremIn, ShiftTheoremReport, VerificationReport,
                    VerifyIn)

API_KEY = api_key()

app = FastAPI(title="FRFT2D API", version=get_config().toolkit.version)


def require_api_key(x_api_key: Optional[str] = Header(default=None)):
    if API_KEY and x_api_key != API_KEY:
        raise HTTPException(status_code=401, detail="Invalid API key")


@app.exception_handler(FrftError)
def frft_error_handler(request: Request, exc: FrftError):
    return JSONResponse(status_code=422, content={"detail": str(exc), "error": type(exc).__name__})


def _image(size: int, seed: Optional[int]) -> np.ndarray:
    cfg = get_config()
    return synthetic_image(size, cfg.synthetic.seed if seed is None else seed)


@app.get("/health")
def health():
    return {"ok": True}


@app.get("/api/predicted-shifts", response_model=PredictedShifts, dependencies=[Depends(require_api_key)])
def api_predicted_shifts(alpha_deg: float, beta_deg: float, delta: float = 0.0, epsilon: float = 0.0,
                         rho: int = 0, lambda_: int = Query(default=0, alias="lambda"),
                         rows: Optional[int] = Query(default=None, ge=2),
                         cols: Optional[int] = Query(default=None, ge=2)):
    shape = (rows, cols or rows) if rows else None
    return predicted_shifts(Angle.from_degrees(alpha_deg), Angle.from_degrees(beta_deg),
                            FrequencyShift(delta=delta, epsilon=epsilon), SpatialShift(rho=rho, lambda_=lambda_),
                            shape=shape)


@app.post("/api/verify/shift-theorem", response_model=List[ShiftTheoremReport],
          dependencies=[Depends(require_api_key)])
def api_shift_theorem(body: ShiftTheoremIn):
    image = _image(body.size, body.seed)
    alpha, beta = Angle.from_degrees(body.alpha_deg), Angle.from_degrees(body.beta_deg)
    shift = FrequencyShift(delta=body.delta, epsilon=body.epsilon)
    image_id = f"synthetic-{body.size}"
    return [verify_phase_invariance(image, alpha, beta, shift, image_id=image_id),
            verify_amplitude_variance(image, alpha, beta, shift, image_id=image_id)]


@app.post("/api/drpe/attack", response_model=AttackMetrics, dependencies=[Depends(require_api_key)])
def api_drpe_attack(body: AttackIn):
    image = _image(body.size, body.seed)
    key = generate_key(body.key_seed, body.size, body.size,
                       Angle.from_degrees(body.alpha_deg), Angle.from_degrees(body.beta_deg))
    return run_attack_demo(image, key, FrequencyShift(delta=body.delta, epsilon=body.epsilon)).metrics


@app.post("/api/verify", response_model=VerificationReport, dependencies=[Depends(require_api_key)])
def api_verify(body: VerifyIn):
    return run_suite(get_config(), inject_fault=body.inject_fault)


if __name__ == "__main__":
    import uvicorn
    uvicorn.run("backend.fastapi.app.main:app", host="127.0.0.1", port=8000, reload=True)
