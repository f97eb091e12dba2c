# backend/api/errors.py
from contextlib import contextmanager
import logging

from fastapi import HTTPException, status

from backend.simulation.errors import (
    CycleError,
    DanglingDependencyError,
    DeadlockError,
    InvalidParameterError,
    ParseError,
    SchemaError,
    UnknownGroupError,
)

logger = logging.getLogger(__name__)

# 입력 오류로 취급하는 예외
_INPUT_ERRORS = (SchemaError, ParseError, InvalidParameterError, CycleError, DanglingDependencyError)


# ==================== 에러 처리 클래스 ====================
class LabErrors:
    """일관된 에러 응답을 생성하는 클래스"""

    @staticmethod
    def invalid_input(message: str) -> HTTPException:
        return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=message)

    @staticmethod
    def not_found(message: str) -> HTTPException:
        return HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=message)

    @staticmethod
    def deadlock(message: str) -> HTTPException:
        return HTTPException(status_code=status.HTTP_409_CONFLICT, detail=message)

    @staticmethod
    def internal_server_error() -> HTTPException:
        return HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail="internal simulation error"
        )


@contextmanager
def simulation_errors():
    """시뮬레이터 예외를 HTTPException 으로 변환하는 컨텍스트 매니저"""
    try:
        yield
    except HTTPException:
        raise
    except _INPUT_ERRORS as e:
        logger.warning(f"잘못된 입력: {e}")
        raise LabErrors.invalid_input(str(e))
    except (UnknownGroupError, FileNotFoundError) as e:
        raise LabErrors.not_found(str(e))
    except DeadlockError as e:
        logger.error(f"교착 상태: {e}", exc_info=True)
        raise LabErrors.deadlock(str(e))
    except Exception as e:
        logger.error(f"처리되지 않은 오류: {e}", exc_info=True)
        raise LabErrors.internal_server_error()
