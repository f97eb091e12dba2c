from contextlib import asynccontextmanager
import logging
import os

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
import uvicorn

from backend.api import simulations, theorems
from backend.config.settings import get_settings

settings = get_settings()

# 로깅 설정
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)
logger = logging.getLogger(__name__)


# --- Lifespan 관리자 ---
@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(
        f"애플리케이션 시작 (environment={settings.ENVIRONMENT}, seed={settings.DEFAULT_SEED}, "
        f"maze={settings.MAZE_WIDTH}x{settings.MAZE_HEIGHT})"
    )
    yield
    logger.info("애플리케이션 종료")


# --- FastAPI 애플리케이션 생성 ---
app = FastAPI(
    title="Group Task Simulator API",
    description="Run multi-agent group task simulations and evaluate the waiting-time laws.",
    version="1.0.0",
    lifespan=lifespan,
)

# CORS 설정
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# 라우터 포함
app.include_router(simulations.router)
app.include_router(theorems.router)


@app.get("/", tags=["Root"])
async def read_root():
    """
    Root endpoint providing a basic health check message.
    """
    return {"message": "Group task simulator API is running."}


if __name__ == "__main__":
    port = int(os.environ.get("PORT", 8000))
    uvicorn.run("backend.main:app", host="0.0.0.0", port=port, reload=settings.DEBUG)
